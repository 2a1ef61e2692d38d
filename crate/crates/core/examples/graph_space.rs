//! An abstract boundary-marked graph read from JSON: boundary distances,
//! quasihyperbolic distances and the best carrot arc to the deepest vertex.
//!
//! ```text
//! cargo run --example graph_space -- [graph.json]
//! ```

use johnspace::john::best_carrot_arc;
use johnspace::qhmetric::qh_distance;
use johnspace::{graph_space, GraphSpace};

const LADDER: &str = r#"{
  "vertices": [{"id": "a"}, {"id": "b"}, {"id": "c"}, {"id": "d"}, {"id": "e"}, {"id": "wall"}],
  "edges": [["a","b",1], ["b","c",1], ["c","d",1], ["a","e",1.5], ["e","d",1.5],
            ["wall","a",0.5], ["wall","b",0.4], ["wall","e",2.5]],
  "boundary": ["wall"]
}"#;

fn main() -> johnspace::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => LADDER.to_string(),
    };
    let space = graph_space(&GraphSpace::from_json(&text)?)?;
    let d = space.boundary_distances();
    let center = (0..d.len()).fold(0, |b, v| if d[v] > d[b] { v } else { b });
    for v in 0..space.vertex_count() {
        let k = qh_distance(&space, v, center)?;
        let arc = best_carrot_arc(&space, v, center, None)?;
        let path: Vec<String> =
            arc.curve().vertices().unwrap_or_default().iter().map(|&u| space.label(u).unwrap().to_string()).collect();
        println!(
            "{:>4}  d = {:.3}  k to center = {:.4}  carrot a = {:.4} via {}",
            space.label(v).unwrap().to_string(),
            d[v],
            k.value,
            arc.constant(),
            path.join("-")
        );
    }
    Ok(())
}
