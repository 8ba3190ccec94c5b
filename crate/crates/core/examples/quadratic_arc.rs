//! Quarter-arc benchmark with a nonlinear constitutive manifold. Pass `ex2`
//! (explicit quadratic) or `ex3` (implicit quadratic) and optionally a time
//! step. The quadratic terms break the mirror symmetry of the linear response.

use ddcd::dynamics::symmetry_defect;
use ddcd::scenario::preset;

fn main() -> ddcd::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "ex2".into());
    let dt = args.next().map(|s| s.parse().expect("dt"));
    let scenario = preset(&name, dt, None, None)?.build(None, &name)?;
    let sim = &scenario.simulation;
    let traj = sim.run_to_end()?;
    let last = traj.last().expect("non-empty trajectory");
    let m = last.momenta;
    println!("{name}: {} steps, mean Newton iterations {:.3}", traj.len() - 1, traj.mean_iterations());
    println!("l  {:.8} {:.8} {:.8}", m.l.x, m.l.y, m.l.z);
    println!("j  {:.8} {:.8} {:.8}", m.j_minus.x, m.j_minus.y, m.j_minus.z);
    let worst = traj.records.iter().map(|r| symmetry_defect(&sim.mesh, &r.q)).fold(0.0, f64::max);
    println!("max mirror mismatch {worst:.3e} m");
    Ok(())
}
