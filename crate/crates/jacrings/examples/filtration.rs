//! The grade dictionary on the Jacobian ring and the eigenvalue behaviour
//! of the multiplication-by-n pushforward on graded pieces.
//!
//! Run with `cargo run --example filtration`.

use jacrings::combin::int_pow;
use jacrings::{JacobianRing, ModelConfig, Rat};

fn main() -> jacrings::Result<()> {
    let jac = JacobianRing::new(ModelConfig::new(3, 0))?;

    // A coweight generator decomposes into graded components.
    let a = jac.gen_c(2);
    println!("c2 = {a}");
    for (grade, part) in jac.grade_split(&a)? {
        println!("  grade {grade} component: {part}");
    }

    // The dictionary is triangular: coweight m meets only grades >= m.
    let b = jac.gen_c(2).mul(&jac.gen_c(3))?;
    let grades: Vec<i64> = jac.grade_split(&b)?.into_keys().collect();
    println!("grades present in c2 * c3: {grades:?}");
    assert!(grades.iter().all(|&n| n >= 5));

    // Pushforward along multiplication by n scales the grade-s piece of a
    // dimension-i class by n^(2i - s).
    let x = jac.curve_class();
    for n in 2..=3i64 {
        let pushed = jac.push_n(&x, n);
        for (s, part) in jac.grade_split(&x)? {
            let expect = part.scale(&Rat::from_integer(int_pow(n, (2 - s) as u32)));
            let got = jac.grade_part(&jac.push_n(&part, n).clone(), s)?;
            assert!(got.sub(&expect).is_zero());
            println!("[{n}]_* on the grade-{s} piece of [C]: eigenvalue {n}^{}", 2 - s);
        }
        let _ = pushed;
    }

    // Graded pieces assemble the descending filtration.
    let mix = jac.curve_class().add(&jac.gen_c(2).mul(&jac.gen_c(2))?);
    for m in 0..=4i64 {
        let fil = jac.fil_component(&mix, m)?;
        println!("filtration level >= {m}: {fil}");
    }
    Ok(())
}
