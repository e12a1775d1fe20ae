//! The two storage conventions for tower classes (plain and twisted), the
//! conversion between them, and the section maps that land in each.
//!
//! Run with `cargo run --example storage_bases`.

use jacrings::series::one_plus_psi_pow;
use jacrings::syminf;
use jacrings::{Basis, Model, ModelConfig};

fn main() -> jacrings::Result<()> {
    // A base of dimension 1, so the tautological class psi is nonzero and
    // the two conventions genuinely differ.
    let m = Model::new(ModelConfig::new(2, 1))?;
    let jac = m.jac();

    // The fundamental class of the Jacobian, sent into the tower by the
    // plain section and by the twisted one.
    let fund = jac.jac_fundamental();
    let plain = m.s_tilde(&fund)?;
    let twisted = m.s_tilde_prime(&fund)?;
    println!("plain section of [J]:   {}   ({})", plain.el, plain.basis);
    println!("twisted section of [J]: {}   ({})", twisted.el, twisted.basis);

    // Converting the plain image into twisted storage exposes the
    // (1 + psi u)^(-2g) twist between the two sections.
    let g = m.config().g;
    let u = m.u_var(1);
    let factor = one_plus_psi_pow(&u, -2 * g as i64)?;
    let converted = m.convert(&plain, Basis::Gamma)?;
    assert!(converted.el.sub(&twisted.el.mul(&factor)?).is_zero());
    println!("convert(plain section) = (1 + psi u)^(-{}) * twisted section", 2 * g);

    // Conversion is a bijection: round trips are exact.
    let back = m.convert(&m.convert(&plain, Basis::Gamma)?, Basis::Beta)?;
    assert!(back.sub(&plain)?.is_zero());
    println!("plain -> twisted -> plain round trip: exact");

    // The projection to the colimit retracts both sections.
    let c = syminf::class_c(jac)?;
    let sec = m.r_section(&c)?;
    let pushed = m.q_push(&sec)?;
    assert!(pushed.sub(&c).is_zero());
    println!("projection retracts the colimit section on [C]: exact");

    // In twisted storage the u-derivation kills coefficient constants;
    // in plain storage it sees them through the twist.
    let c2 = m.twisted(jac.gen_c(2))?;
    assert!(m.du_gamma(&c2)?.is_zero());
    println!("twisted u-derivation kills c2: exact");
    let c2_plain = m.plain(jac.gen_c(2))?;
    println!("plain u-derivation on c2: {}", m.du_beta(&c2_plain)?.el);
    Ok(())
}
