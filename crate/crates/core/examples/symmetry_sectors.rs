//! Dicke basis of three three-level atoms and the decomposition of the
//! density-matrix space into permutation sectors.

use coopjump::symmetry::{build_dicke_basis, build_irrep_dm_basis, subspace_partition};

fn main() {
    let dicke = build_dicke_basis(3);
    let parts = subspace_partition(&dicke);
    for (i, s) in parts.sets.iter().enumerate() {
        let labels: Vec<&str> = s.iter().map(|&k| dicke.states[k].label.as_str()).collect();
        println!("S{i} ({} states): {}", s.len(), labels.join(" "));
    }
    let basis = build_irrep_dm_basis(&dicke);
    println!("\n{}", basis.dimension_table());
}
