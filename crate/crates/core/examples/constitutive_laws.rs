//! The three benchmark laws: stress responses, spurious-root check, and
//! synthetic noisy measurements checked against the manifold.

use ddcd::beam::Vec6;
use ddcd::constitutive::{
    noise_residual_bound, sample_data_set, validate_manifold, ConstitutiveLaw, OperatingRange, StrainBox,
};

fn main() -> ddcd::Result<()> {
    let laws = [
        ("linear", ConstitutiveLaw::benchmark_linear()),
        ("explicit quadratic", ConstitutiveLaw::benchmark_explicit()),
        ("implicit quadratic", ConstitutiveLaw::benchmark_implicit()),
    ];
    let strain_box = StrainBox::symmetric(0.05)?;
    for (label, law) in &laws {
        println!("{label}");
        for x in [-0.05, 0.0, 0.05] {
            let s = law.stress(&Vec6::repeat(x)).expect("admissible");
            println!("  e = {x:+.2}: s3 = {:+.5}, s6 = {:+.5}", s[2], s[5]);
        }
        let check = law.consistency_check(&OperatingRange::default());
        for r in &check.spurious {
            if r.component == 2 {
                println!("  spurious root of component 3 at {:?} = {:.4}", r.variable, r.location);
            }
        }
        println!("  consistency check passed: {}", check.passed);

        let noise = 1e-4;
        let data = sample_data_set(law, &strain_box, 200, noise, 7)?;
        let bound = noise_residual_bound(law, &strain_box, noise);
        let report = validate_manifold(law, &data, bound)?;
        println!(
            "  {} noisy points: max ‖h‖∞ {:.3e} within bound {:.3e}: {}",
            data.len(),
            report.max_residual,
            bound,
            report.passed
        );
    }
    Ok(())
}
