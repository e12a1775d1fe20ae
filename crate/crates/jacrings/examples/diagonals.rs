//! Diagonal classes in the bounded symmetric powers: the divided
//! t-derivative ladder, the base-point transfer, and the degree grading.
//!
//! Run with `cargo run --example diagonals`.

use jacrings::combin::rat;
use jacrings::{ClassSpec, Model, ModelConfig, Var};

fn main() -> jacrings::Result<()> {
    let m = Model::new(ModelConfig::new(2, 0).with_points(["p"]))?;
    let point = ClassSpec::Point("p".into());

    // Small diagonals of the curve class and of a point.
    for n in 0..=3u32 {
        let d = m.delta_push(n, &ClassSpec::Curve)?;
        println!("Delta_{n}([C]) = {}   ({} storage)", d.el, d.basis);
    }
    let d3 = m.delta_push(3, &point)?;
    println!("Delta_3([p]) = {}", d3.el);

    // Divided t-derivative ladder: one step down in the diagonal degree.
    let d2 = m.delta_push(2, &point)?;
    let down = m.dt_div(&d3, 1);
    assert!(down.sub(&d2)?.is_zero());
    println!("dt^[1] Delta_3([p]) = Delta_2([p])   exact");

    // Base-point transfer: P01 Delta_n(a) = n p0^*(a) t^(n-1).
    let lhs = m.p01_p0(&d3)?;
    let want = jacrings::Element::var(m.jac().table(), Var::T, 2)
        .mul(&m.jac().p0_pull(&point))?
        .scale(&rat(3, 1));
    assert!(lhs.el.sub(&want).is_zero());
    println!("P01 Delta_3([p]) = 3 t^2   exact");

    // Diagonal degrees behave like a grading: Delta_n is pure of degree n,
    // and products add degrees.
    let prod = d2.mul(&m.delta_push(1, &ClassSpec::Curve)?)?;
    let split = m.degree_split(&prod)?;
    for (deg, part) in &split {
        println!("degree {deg} part of Delta_2([p]) * Delta_1([C]): {}", part.el);
    }
    assert!(split.keys().all(|&deg| deg == 3));

    // The modified diagonals vanish once the degree passes 2g + 2.
    for n in 1..=(2 * m.config().g + 3) {
        let gn = m.gamma_n(n, &ClassSpec::Curve)?;
        let status = if gn.is_zero() { "0" } else { "nonzero" };
        println!("Gamma_{n}([C]) is {status}");
    }
    Ok(())
}
