//! Runs the dynamics described by a configuration document.
//!
//! cargo run --example from_config -- crates/core/examples/configs/straight_line.json

use lightfront::config::ConfigDoc;
use lightfront::scenarios::run_document;

fn main() -> lightfront::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/straight_line.json").to_string()
    });
    let (doc, _) = ConfigDoc::load(path.as_ref())?;
    let run = run_document(&doc)?;
    println!("halted: {}, events: {:?}", run.dynamics.halted(), run.dynamics.events());
    for (i, h) in run.dynamics.histories().iter().enumerate() {
        let last = h.nodes().last().unwrap();
        println!("charge {i}: {} nodes, final q = {:.6?}", h.nodes().len(), last.q.as_slice());
    }
    Ok(())
}
