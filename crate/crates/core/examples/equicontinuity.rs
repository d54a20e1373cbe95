//! Empirical moduli of continuity in the parameter: `sin(1/μ)` keeps a unit
//! gap at every scale, `μ sin(π/μ)` decays but is not Lipschitz.

use pfc::lab::{build_family, equicontinuity_scan, h_lipschitz_pairs, lipschitz_scan, DeltaLadder, FamilyParams, PairSampler, TxGrid};

fn main() -> pfc::Result<()> {
    for name in ["sin-inv", "mu-sin-pi"] {
        let fam = build_family(name, &FamilyParams::default())?;
        let ladder = DeltaLadder::default_for(fam.param_box());
        let sampler = PairSampler::with_seed(3).with_witnesses(fam.witnesses.clone());
        let grid = TxGrid::default_for(&fam);
        let table = equicontinuity_scan(&*fam.field(), &grid, &sampler, fam.param_box(), &ladder)?;
        println!("{name}: {}", table.verdict.as_str());
        for (d, w) in table.delta_ladder.iter().zip(&table.omega) {
            println!("  delta {d:>10.3e}  omega {w:.6}");
        }
        if name == "mu-sin-pi" {
            let lip = lipschitz_scan(&*fam.field(), &grid, &h_lipschitz_pairs(200))?;
            println!("  largest difference quotient: {lip:.2}");
        }
    }
    Ok(())
}
