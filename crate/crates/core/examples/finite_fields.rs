//! Orthogonal blocks over F_q and their eigenvalue certificates.

use fatflat::arith::{charpoly_reduction_check, field_report};

fn main() -> fatflat::Result<()> {
    for q in [3, 5, 7, 11, 13] {
        let r = field_report(q, 2)?;
        println!(
            "q = {q:>2}: generator {}, nonresidue {}, split order {:?}, anisotropic order {:?}",
            r.generator, r.nonresidue, r.split_order, r.anisotropic_order
        );
        for e in &r.elements {
            println!(
                "    {:?}: charpoly {:?}, certificate {}",
                e.variant, e.certificate.charpoly, e.certificate.matches
            );
        }
    }

    let g = vec![vec![2, -1, 0], vec![1, 3, 4], vec![0, 5, -2]];
    let check = charpoly_reduction_check(&g, 7)?;
    println!(
        "charpoly over Z {:?} reduces to {:?} mod 7: {}",
        check.integer_charpoly, check.reduced, check.equal
    );
    Ok(())
}
