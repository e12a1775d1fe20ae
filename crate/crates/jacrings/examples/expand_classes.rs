//! Expands the named classes on the infinite symmetric power of a genus-2
//! curve and shows the two coordinate systems side by side.
//!
//! Run with `cargo run --example expand_classes`.

use jacrings::syminf;
use jacrings::{JacobianRing, ModelConfig};

fn main() -> jacrings::Result<()> {
    let jac = JacobianRing::new(ModelConfig::new(2, 0))?;

    // The universal divisor variable and the curve class.
    let l = syminf::class_l(&jac);
    let c = syminf::class_c(&jac)?;
    println!("L   in x-coordinates: {l}");
    println!("L   in u-coordinates: {}", syminf::x_to_u(&jac, &l)?);
    println!("[C] in x-coordinates: {c}");
    println!("[C] in u-coordinates: {}", syminf::x_to_u(&jac, &c)?);

    // L is recovered from [C] by the logarithm built into the model.
    let closed = syminf::l_closed_form(&jac)?;
    assert!(closed.sub(&l).is_zero());
    println!("log form recovers L: exact");

    // Bounded symmetric powers, as divided powers of the curve class.
    for n in 1..=3u32 {
        let cn = syminf::class_cn(&jac, n)?;
        assert!(cn.sub(&c.divided_power(n)?).is_zero());
        println!("[C_{n}] = {cn}");
    }

    // The section image of the Jacobian, two independent constructions.
    let gamma = syminf::class_gamma(&jac)?;
    let from_push = syminf::class_gamma_from_push(&jac, 2)?;
    assert!(gamma.sub(&from_push).is_zero());
    println!("Gamma = {gamma}");
    println!("Gamma from the multiplication-by-2 pushforward: same element");

    // Coordinate substitutions invert each other.
    let round = syminf::u_to_x(&jac, &syminf::x_to_u(&jac, &c)?)?;
    assert!(round.sub(&c).is_zero());
    println!("x -> u -> x round trip on [C]: exact");
    Ok(())
}
