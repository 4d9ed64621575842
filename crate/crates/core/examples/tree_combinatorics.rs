//! Words on the free semigroup, breadth-first truncations and `Δ_n` counts.

use hpd::tree::{relation, GeneralRootedTree, TreeTruncation, Vertex};

fn main() -> hpd::Result<()> {
    let trunc = TreeTruncation::new(2, 3)?;
    println!("T(2) to depth 3 has {} vertices", trunc.len());
    for level in 0..=trunc.depth() {
        let labels: Vec<_> = trunc.labels()[trunc.level_range(level)].to_vec();
        println!("  level {level}: {}", labels.join(" "));
    }

    let a: Vertex = "s1s2s1".parse()?;
    let b: Vertex = "s1s2".parse()?;
    let c: Vertex = "s2".parse()?;
    println!("relation(s1s2s1, s1s2) = {:?}", relation(&a, &b));
    println!("relation(s1s2s1, s2)  = {:?}", relation(&a, &c));

    let t = GeneralRootedTree::tq1(3, 6)?;
    println!("T(3;1) with {} vertices, Δ_n = {:?}", t.len(), t.delta_sequence(5));
    Ok(())
}
