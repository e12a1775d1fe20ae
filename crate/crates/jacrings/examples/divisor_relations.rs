//! Emits the tautological relation families attached to a divisor with a
//! prescribed section-space bound, and cross-checks the closed forms.
//!
//! Run with `cargo run --example divisor_relations`.

use jacrings::divisors::{point_class, DivisorCalc, DivisorSpec};
use jacrings::{Model, ModelConfig};

fn main() -> jacrings::Result<()> {
    let m = Model::new(ModelConfig::new(2, 0).with_points(["p1", "p2"]))?;
    let calc = DivisorCalc::new(&m, DivisorSpec::new(["p1", "p2"], 1)?)?;

    println!("divisor {} of degree {}", calc.spec(), calc.degree());
    println!("its class in the tower: {}", calc.divisor_class().el);
    if let Some(w) = calc.clifford_warning() {
        println!("warning: {w}");
    }

    // The degree-top reduced class factors over the points of the divisor.
    let t = m.twisted(m.t_var())?;
    let want = point_class(&m, "p1")?
        .sub(&t)?
        .mul(&point_class(&m, "p2")?.sub(&t)?)?;
    let top = calc.ebar_class(2)?;
    assert!(top.sub(&want)?.is_zero());
    println!("ebar_2(D) = ([p1] - t)([p2] - t)   exact");

    // Every relation family, one line per emitted relation.
    let set = calc.emit_all()?;
    for r in &set.relations {
        println!(
            "{:<14} [{} N={} s={} {}] {}",
            r.label, r.flavor, r.n, r.s, r.basis, r.el
        );
    }
    for note in &set.notes {
        println!("note: {note}");
    }
    println!("{} relations emitted", set.relations.len());
    Ok(())
}
