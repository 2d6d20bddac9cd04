//! Quarter-domain mesh with the tip fan; prints statistics and writes the
//! text dump to stdout when `--dump` is given.

use sge_crack::mesh::BoundaryTag;
use sge_crack::{generate_quarter_mesh, DomainSpec};

fn main() -> sge_crack::Result<()> {
    let spec = DomainSpec::new(0.2, 1.0, 0.002, 5);
    let mesh = generate_quarter_mesh(&spec)?;
    println!("{:#?}", mesh.stats());
    for tag in [BoundaryTag::CrackFace, BoundaryTag::Ligament, BoundaryTag::LeftSymmetry, BoundaryTag::Top, BoundaryTag::Right] {
        println!("{:>14}: {} nodes", tag.name(), mesh.nodes_with(tag).len());
    }
    println!("fan elements around the tip node {}:", mesh.tip_node);
    for &e in &mesh.fan {
        println!("  {:?}", mesh.element_nodes(e));
    }
    if std::env::args().any(|a| a == "--dump") {
        mesh.write_text(std::io::stdout().lock())?;
    }
    Ok(())
}
