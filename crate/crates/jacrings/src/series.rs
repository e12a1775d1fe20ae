//! Finite series evaluation in the window: exp, log(1+.), geometric inverse,
//! and the psi-divided variants used by the curve and diagonal closed forms.
//!
//! A series argument must be *transient*: every term must carry a positive
//! psi power, a generator factor (which strictly raises the window-bounded
//! coweight), or a `u` factor under an active `u_cap`. Transient powers die in
//! finitely many steps, so all sums here are finite and exact; the psi-divided
//! variants are finite for any argument because `psi^k` vanishes at the window
//! order.

use crate::algebra::{Element, Var};
use crate::combin::{rat, rat_i};
use crate::{Error, Result};

/// Why a term keeps powers from living forever.
fn term_is_transient(e: &Element, mono: &crate::algebra::Monomial) -> bool {
    let table = e.table();
    let cap = table.window().u_cap;
    if mono.u > 0 && cap.is_some() {
        return true;
    }
    if let Some(pi) = table.psi_index() {
        if mono.gens[pi] > 0 {
            return true;
        }
    }
    mono.gens
        .iter()
        .enumerate()
        .any(|(i, &x)| x > 0 && Some(i) != table.psi_index())
}

fn check_transient(a: &Element, what: &str) -> Result<()> {
    for (m, _) in a.iter() {
        if !term_is_transient(a, m) {
            return Err(Error::NonTransient(format!(
                "{what}: term with bare t/u/x powers never dies in the window"
            )));
        }
    }
    Ok(())
}

fn max_steps(a: &Element) -> u32 {
    let w = a.table().window();
    // every transient factor raises psi, coweight, or capped u by >= 1;
    // all three are bounded, so powers vanish beyond the sum of the bounds
    w.psi_order() + 2 * w.g + w.u_cap.unwrap_or(0) + 2
}

/// `exp(a) = sum_k gamma_k(a)`; `a` transient with no unit component.
pub fn exp(a: &Element) -> Result<Element> {
    check_transient(a, "exp")?;
    let mut acc = Element::one(a.table());
    let mut pow = Element::one(a.table());
    let mut k = 0;
    while !pow.is_zero() {
        k += 1;
        if k > max_steps(a) {
            return Err(Error::NonTransient("exp: series failed to terminate".into()));
        }
        pow = pow.mul(a)?.div_int(k);
        acc = acc.add(&pow);
    }
    Ok(acc)
}

/// `log(1 + v) = sum_k (-1)^(k-1) v^k / k`; `v` transient.
pub fn log1p(v: &Element) -> Result<Element> {
    check_transient(v, "log1p")?;
    let mut acc = Element::zero(v.table());
    let mut pow = Element::one(v.table());
    let mut k = 0;
    while !pow.is_zero() {
        k += 1;
        if k > max_steps(v) {
            return Err(Error::NonTransient(
                "log1p: series failed to terminate".into(),
            ));
        }
        pow = pow.mul(v)?;
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc = acc.add(&pow.scale(&rat(sign, k as i64)));
    }
    Ok(acc)
}

/// `(1 + v)^(-1) = sum_k (-v)^k`; `v` transient. The result satisfies
/// `(1+v) * geom_inv(v) = 1` exactly in the window.
pub fn geom_inv(v: &Element) -> Result<Element> {
    check_transient(v, "geom_inv")?;
    let mut acc = Element::one(v.table());
    let mut pow = Element::one(v.table());
    let mut k = 0;
    while !pow.is_zero() {
        k += 1;
        if k > max_steps(v) {
            return Err(Error::NonTransient(
                "geom_inv: series failed to terminate".into(),
            ));
        }
        pow = pow.mul(v)?.neg();
        acc = acc.add(&pow);
    }
    Ok(acc)
}

/// `(1 + v)^n` for any integer `n` (negative via `geom_inv`).
pub fn one_plus_pow(v: &Element, n: i64) -> Result<Element> {
    let base = Element::one(v.table()).add(v);
    if n >= 0 {
        base.pow(n as u32)
    } else {
        geom_inv(v)?.pow((-n) as u32)
    }
}

/// `log(1 + psi*a) / psi = sum_k (-1)^(k-1) psi^(k-1) a^k / k`.
///
/// Finite for any `a` (the psi prefactor kills high terms), no transience
/// needed; this is the well-defined "divided logarithm".
pub fn log1p_over_psi(a: &Element) -> Result<Element> {
    let table = a.table();
    let psi = Element::psi(table);
    let mut acc = Element::zero(table);
    let mut body = Element::one(table); // psi^(k-1) a^k accumulated stepwise
    for k in 1..=table.window().psi_order() {
        body = body.mul(a)?;
        if k > 1 {
            body = body.mul(&psi)?;
        }
        if body.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc = acc.add(&body.scale(&rat(sign, k as i64)));
    }
    Ok(acc)
}

/// `(exp(psi*a) - 1) / psi = sum_k psi^(k-1) a^[k]`; `a` unit-free.
pub fn exp_minus1_over_psi(a: &Element) -> Result<Element> {
    let table = a.table();
    let psi = Element::psi(table);
    let mut acc = Element::zero(table);
    let mut body = Element::one(table);
    for k in 1..=table.window().psi_order() {
        body = body.mul(a)?.div_int(k);
        if k > 1 {
            body = body.mul(&psi)?;
        }
        if body.is_zero() {
            break;
        }
        acc = acc.add(&body);
    }
    Ok(acc)
}

/// `exp(psi*a) = 1 + psi * exp_minus1_over_psi(a)`.
pub fn exp_psi(a: &Element) -> Result<Element> {
    let table = a.table();
    let em1 = exp_minus1_over_psi(a)?;
    Ok(Element::one(table).add(&Element::psi(table).mul(&em1)?))
}

/// `(1 + psi*v)^n` for integer `n` of either sign, exact in the window.
pub fn one_plus_psi_pow(v: &Element, n: i64) -> Result<Element> {
    let pv = Element::psi(v.table()).mul(v)?;
    one_plus_pow(&pv, n)
}

/// `1 - t` as an element (for the section formula in `t`).
pub fn one_minus_t(table: &std::sync::Arc<crate::algebra::GenTable>) -> Element {
    Element::one(table).sub(&Element::var(table, Var::T, 1))
}

/// The scalar `n` as an element.
pub fn int_elem(table: &std::sync::Arc<crate::algebra::GenTable>, n: i64) -> Element {
    Element::scalar(table, rat_i(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{GenKind, GenTable, Generator, Window};
    use std::sync::Arc;

    fn table(g: u32, d: u32) -> Arc<GenTable> {
        let mut gens = vec![Generator {
            name: "psi".into(),
            dim: -1,
            coweight: 0,
            grade: 0,
            kind: GenKind::Psi,
        }];
        for k in 2..=2 * g {
            gens.push(Generator {
                name: format!("c{k}"),
                dim: 1,
                coweight: k,
                grade: 0,
                kind: GenKind::CurveCw(k),
            });
        }
        GenTable::new(gens, Window { g, d, u_cap: None }).unwrap()
    }

    fn gen(t: &Arc<GenTable>, name: &str) -> Element {
        Element::generator(t, t.index_of(name).unwrap())
    }

    #[test]
    fn exp_psi_x_truncates_at_psi_order() {
        // d = 1: psi^2 = 0, so exp(psi x) = 1 + psi x
        let t = table(2, 1);
        let x = Element::var(&t, Var::X, 1);
        let e = exp_psi(&x).unwrap();
        let expect = Element::one(&t).add(&Element::psi(&t).mul(&x).unwrap());
        assert_eq!(e, expect);
        // d = 2, g = 3: psi^3 = 0: one more term, with the divided power
        let t = table(3, 2);
        let x = Element::var(&t, Var::X, 1);
        let e = exp_psi(&x).unwrap();
        let psi = Element::psi(&t);
        let expect = Element::one(&t)
            .add(&psi.mul(&x).unwrap())
            .add(&psi.pow(2).unwrap().mul(&Element::var(&t, Var::X, 2)).unwrap());
        assert_eq!(e, expect);
    }

    #[test]
    fn exp_log_round_trip() {
        let t = table(3, 2);
        let v = Element::psi(&t)
            .mul(&Element::var(&t, Var::X, 1))
            .unwrap()
            .add(&gen(&t, "c2"));
        let e = exp(&v).unwrap().sub(&Element::one(&t));
        assert_eq!(log1p(&e).unwrap(), v);
    }

    #[test]
    fn geom_inv_is_exact_inverse() {
        let t = table(2, 2);
        let v = Element::psi(&t)
            .mul(&Element::var(&t, Var::U, 1))
            .unwrap()
            .add(&gen(&t, "c2").scale(&rat(2, 3)));
        let inv = geom_inv(&v).unwrap();
        let prod = Element::one(&t).add(&v).mul(&inv).unwrap();
        assert_eq!(prod, Element::one(&t));
        // integer powers agree with repeated multiplication
        let p3 = one_plus_pow(&v, 3).unwrap();
        let q = Element::one(&t).add(&v).pow(3).unwrap();
        assert_eq!(p3, q);
        let pm2 = one_plus_pow(&v, -2).unwrap();
        let back = pm2.mul(&Element::one(&t).add(&v).pow(2).unwrap()).unwrap();
        assert_eq!(back, Element::one(&t));
    }

    #[test]
    fn bare_variables_rejected() {
        let t = table(2, 1);
        let u = Element::var(&t, Var::U, 1);
        assert!(matches!(geom_inv(&u), Err(Error::NonTransient(_))));
        let tt = Element::var(&t, Var::T, 1);
        assert!(matches!(exp(&tt), Err(Error::NonTransient(_))));
        // but a capped table admits u-series
        let capped = GenTable::new(
            t.gens().to_vec(),
            Window {
                g: 2,
                d: 1,
                u_cap: Some(4),
            },
        )
        .unwrap();
        let u = Element::var(&capped, Var::U, 1);
        let inv = geom_inv(&u).unwrap();
        let prod = Element::one(&capped).add(&u).mul(&inv).unwrap();
        // exact only up to the cap: the identity holds after capping
        assert_eq!(prod, Element::one(&capped));
        assert!(capped.cap_hits() > 0);
    }

    #[test]
    fn psi_divided_forms() {
        // log1p_over_psi(u) at d=1: u - psi*u^2/2 with u^2 = 2 u^[2]
        let t = table(2, 1);
        let u = Element::var(&t, Var::U, 1);
        let l = log1p_over_psi(&u).unwrap();
        let expect = u.sub(
            &Element::psi(&t)
                .mul(&Element::var(&t, Var::U, 2))
                .unwrap(),
        );
        assert_eq!(l, expect);
        // psi * log1p_over_psi(a) = log1p(psi a) for a transient argument
        let a = gen(&t, "c2");
        let lhs = Element::psi(&t).mul(&log1p_over_psi(&a).unwrap()).unwrap();
        let rhs = log1p(&Element::psi(&t).mul(&a).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
