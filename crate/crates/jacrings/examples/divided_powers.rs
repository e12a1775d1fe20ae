//! Divided-power arithmetic: the free engine over integer coefficients,
//! the windowed variables of the tower, and the series that tie them up.
//!
//! Run with `cargo run --example divided_powers`.

use jacrings::combin::{rat, Int};
use jacrings::cycles::{gamma_compose_coeff, gamma_multinomial, CycleElem};
use jacrings::series;
use jacrings::{Element, Model, ModelConfig};

fn main() -> jacrings::Result<()> {
    // Same-symbol products contract with binomial coefficients:
    // gamma_2(Z) gamma_3(Z) = C(5,2) gamma_5(Z).
    let g2 = CycleElem::gamma(1, 0, 2);
    let g3 = CycleElem::gamma(1, 0, 3);
    let g5 = CycleElem::gamma(1, 0, 5);
    let prod = g2.mul(&g3);
    assert!(prod.sub(&g5.scale(&Int::from(10))).is_zero());
    println!("gamma_2(Z) gamma_3(Z) = {prod}");

    // gamma_d of a sum expands by the multinomial law.
    let expanded = gamma_multinomial(&[Int::from(1), Int::from(2)], 3, 8)?;
    println!("gamma_3(Z_0 + 2 Z_1) = {expanded}");

    // Composition packs with the coefficient (mn)! / (m! (n!)^m).
    println!(
        "gamma_3(gamma_2(z)) = {} gamma_6(z)",
        gamma_compose_coeff(3, 2)
    );

    // The same law drives the windowed u-variable of the tower.
    let m = Model::new(ModelConfig::new(4, 0))?;
    let u2 = m.u_var(2);
    let cubed = u2.divided_power(3)?;
    assert!(cubed.sub(&m.u_var(6).scale(&rat(15, 1))).is_zero());
    println!("gamma_3(u^[2]) = {cubed}");

    // Exponential and logarithm invert each other on window-nilpotent input.
    let jac = m.jac();
    let v = jac.gen_c(2).add(&m.u_var(1));
    let e = series::exp(&v)?;
    let back = series::log1p(&e.sub(&Element::one(jac.table())))?;
    assert!(back.sub(&v).is_zero());
    println!("log(exp(c2 + u)) = c2 + u   exact");

    // Geometric inversion: (1 + v)^(-1) multiplies back to 1.
    let inv = series::geom_inv(&v)?;
    let one = Element::one(jac.table()).add(&v).mul(&inv)?;
    assert!(one.sub(&Element::one(jac.table())).is_zero());
    println!("(1 + c2 + u)^(-1) * (1 + c2 + u) = 1   exact");
    Ok(())
}
