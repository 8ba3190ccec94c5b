//! Exact data-driven solutions on nested grids of noise-free linear-law data
//! approach the approximate-NLP solution over the same law.

use ddcd::scenario::grid_refinement_study;

fn main() -> ddcd::Result<()> {
    let spacings = [4e-3, 1e-3, 2.5e-4];
    println!("{:>10} {:>7} {:>14} {:>14}", "spacing", "points", "max |Δq|", "max cost");
    for level in grid_refinement_study(&spacings, 0.04)? {
        println!(
            "{:>10.2e} {:>7} {:>14.6e} {:>14.6e}",
            level.spacing, level.points, level.max_q_difference, level.max_dcnlp_cost
        );
    }
    Ok(())
}
