//! The infinite symmetric power of the curve, presented as the Jacobian ring
//! with one extra divided-power variable `x` for the universal divisor class.
//!
//! Everything here stays in `x`-coordinates.  The bounded symmetric powers,
//! which add `t` and `u`, live in [`crate::tower`]; the two pictures are tied
//! together by the substitutions [`u_to_x`] / [`x_to_u`] and the projection
//! `q_push` on the tower side.

use crate::algebra::{Element, Grading, Var};
use crate::combin::{int_pow, rat, Rat};
use crate::jacobian::{ClassSpec, JacobianRing};
use crate::series::{exp_minus1_over_psi, exp_psi, log1p_over_psi};
use crate::{Error, Result};

/// The exponential `exp(psi x)` of the divisor variable (a finite sum).
pub fn e_of_x(jac: &JacobianRing) -> Result<Element> {
    exp_psi(&class_l(jac))
}

/// `(exp(psi x) - 1)/psi`, the divided form of the exponential.
pub fn em1_of_x(jac: &JacobianRing) -> Result<Element> {
    exp_minus1_over_psi(&class_l(jac))
}

/// Pullback along the zero section of the symmetric power: drops every term
/// that carries `x`.
pub fn sigma_push(f: &Element) -> Element {
    f.filter_terms(|m| m.x == 0)
}

/// Cap with the universal divisor: the derivation `x^[m] -> x^[m-1]`.
pub fn xi_cap(f: &Element) -> Element {
    f.map_monomials(|m| {
        if m.x == 0 {
            None
        } else {
            let mut mm = m.clone();
            mm.x -= 1;
            Some((mm, rat(1, 1)))
        }
    })
}

/// Pushforward along multiplication by `n` on divisor classes: each term is
/// scaled by `n^w` where `w` is its total coweight (the `x`-index counts 1
/// per step).
pub fn push_n_inf(f: &Element, n: i64) -> Result<Element> {
    if f.iter().any(|(m, _)| m.u > 0 || m.t > 0) {
        return Err(Error::CoordMixed("push_n_inf expects x-coordinates"));
    }
    let table = f.table().clone();
    Ok(f.map_monomials(|m| {
        let w = Element::grading_of(&table, m, Grading::Coweight);
        Some((m.clone(), Rat::from_integer(int_pow(n, w as u32))))
    }))
}

/// The class of the curve inside its infinite symmetric power:
/// `c * exp(psi x) + (exp(psi x) - 1)/psi`.
pub fn class_c(jac: &JacobianRing) -> Result<Element> {
    let e = e_of_x(jac)?;
    Ok(jac.curve_class().mul(&e)?.add(&em1_of_x(jac)?))
}

/// The `n`-th symmetric power of the curve as a class, through the expansion
/// `sum_m w_{n-m} * exp((n-m) psi x) * gamma_m((exp(psi x) - 1)/psi)`.
///
/// Agrees with the `n`-th divided power of [`class_c`].
pub fn class_cn(jac: &JacobianRing, n: u32) -> Result<Element> {
    let e = e_of_x(jac)?;
    let em1 = em1_of_x(jac)?;
    let mut epow = vec![Element::one(jac.table())];
    for k in 1..=n {
        epow.push(epow[(k - 1) as usize].mul(&e)?);
    }
    let mut acc = Element::zero(jac.table());
    let mut gpow = Element::one(jac.table());
    for m in 0..=n {
        let term = jac
            .w_class(n - m)
            .mul(&epow[(n - m) as usize])?
            .mul(&gpow)?;
        acc = acc.add(&term);
        if m < n {
            gpow = gpow.mul(&em1)?.scale(&rat(1, (m as i64) + 1));
        }
    }
    Ok(acc)
}

/// The universal divisor variable itself.
pub fn class_l(jac: &JacobianRing) -> Element {
    Element::var(jac.table(), Var::X, 1)
}

/// Closed form recovering the divisor variable from the curve class:
/// `(log(1 + psi [C]) - log(1 + psi c))/psi`.
pub fn l_closed_form(jac: &JacobianRing) -> Result<Element> {
    Ok(log1p_over_psi(&class_c(jac)?)?.sub(&log1p_over_psi(&jac.curve_class())?))
}

/// The section image of the Jacobian inside the symmetric power: the `g`-th
/// divided power of `(exp(-psi L) - 1)/psi + [C] exp(-psi L)`.
pub fn class_gamma(jac: &JacobianRing) -> Result<Element> {
    let minus_x = class_l(jac).neg();
    let inner = exp_minus1_over_psi(&minus_x)?.add(&class_c(jac)?.mul(&exp_psi(&minus_x)?)?);
    inner.divided_power(jac.config().g)
}

/// The same section image computed from the multiplication-by-`n` map:
/// `(n-1)^{-g} * gamma_g((log(1 + psi [n]_*[C]) - n log(1 + psi [C])) / n)`.
pub fn class_gamma_from_push(jac: &JacobianRing, n: i64) -> Result<Element> {
    if n < 2 {
        return Err(Error::Range(format!(
            "class_gamma_from_push needs n >= 2, got {n}"
        )));
    }
    let c = class_c(jac)?;
    let inner = log1p_over_psi(&push_n_inf(&c, n)?)?
        .sub(&log1p_over_psi(&c)?.scale(&rat(n, 1)))
        .scale(&rat(1, n));
    let g = jac.config().g;
    let scale = Rat::from_integer(int_pow(n - 1, g)).recip();
    Ok(inner.divided_power(g)?.scale(&scale))
}

/// True when the element is a polynomial in `psi` alone.
pub fn is_psi_poly(jac: &JacobianRing, el: &Element) -> bool {
    let psi = jac.table().psi_index();
    el.iter().all(|(m, _)| {
        m.t == 0
            && m.u == 0
            && m.x == 0
            && m.gens
                .iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || Some(i) == psi)
    })
}

/// The image in the infinite symmetric power of a class on the curve, from
/// its two restriction data: `iota_part * exp(psi x) + p0_pull * (exp(psi x)
/// - 1)/psi`.  The base-point pullback must lie in `Q[psi]`.
pub fn fa_build(jac: &JacobianRing, iota_part: &Element, p0_pull: &Element) -> Result<Element> {
    if !is_psi_poly(jac, p0_pull) {
        return Err(Error::Config(
            "fa_build: base-point pullback must lie in Q[psi]".into(),
        ));
    }
    Ok(iota_part
        .mul(&e_of_x(jac)?)?
        .add(&p0_pull.mul(&em1_of_x(jac)?)?))
}

/// [`fa_build`] applied to one of the named geometric classes.
pub fn fa_of_spec(jac: &JacobianRing, spec: &ClassSpec) -> Result<Element> {
    fa_build(jac, &jac.iota_part(spec)?, &jac.p0_pull(spec))
}

/// `(log(1 + psi u) - log(1 + psi c))/psi`: the image of the divisor
/// variable in symmetric-power coordinates.
pub fn l_of_u(jac: &JacobianRing) -> Result<Element> {
    let u = Element::var(jac.table(), Var::U, 1);
    Ok(log1p_over_psi(&u)?.sub(&log1p_over_psi(&jac.curve_class())?))
}

/// Rewrites an `x`-coordinate class in the symmetric-power variable `u`.
pub fn x_to_u(jac: &JacobianRing, f: &Element) -> Result<Element> {
    f.substitute(Var::X, &l_of_u(jac)?)
}

/// Rewrites a `u`-coordinate class in `x`-coordinates via `u -> [C]`.
pub fn u_to_x(jac: &JacobianRing, h: &Element) -> Result<Element> {
    if h.iter().any(|(m, _)| m.t > 0) {
        return Err(Error::CoordMixed("u_to_x expects no t variable"));
    }
    h.substitute(Var::U, &class_c(jac)?)
}

/// The `(i, j)` component of a class in the infinite symmetric power:
/// dimension `i` and coweight `2i + j`.
pub fn component_inf(f: &Element, i: i64, j: i64) -> Element {
    let table = f.table().clone();
    f.filter_terms(|m| {
        Element::grading_of(&table, m, Grading::Dimension) == i
            && Element::grading_of(&table, m, Grading::Coweight) == 2 * i + j
    })
}

/// Closed form for the `(1, j)` component of the curve class:
/// `psi^{1+j} x^[2+j] + sum_n c_{2+j-n} psi^n x^[n]`.
pub fn curve_component_form(jac: &JacobianRing, j: i64) -> Result<Element> {
    if j < -1 {
        return Ok(jac.zero());
    }
    let table = jac.table();
    let psi = jac.psi();
    let lead = psi
        .pow((j + 1) as u32)?
        .mul(&Element::var(table, Var::X, (j + 2) as u32))?;
    let mut acc = lead;
    let mut n = 0i64;
    while 2 + j - n >= 2 {
        let term = jac
            .gen_c((2 + j - n) as u32)
            .mul(&psi.pow(n as u32)?)?
            .mul(&Element::var(table, Var::X, n as u32))?;
        acc = acc.add(&term);
        n += 1;
    }
    Ok(acc)
}

/// The range of `j` for which the `(1, j)` curve component can be nonzero.
pub fn curve_component_range(jac: &JacobianRing) -> std::ops::RangeInclusive<i64> {
    -1..=(2 * jac.config().g as i64 - 2)
}

/// Embeds a Jacobian class as a divisor-constant class (the inclusion is the
/// identity on coefficients; this just validates the input).
pub fn s_embed(y: &Element) -> Result<Element> {
    if y.iter().any(|(m, _)| m.t > 0 || m.u > 0 || m.x > 0) {
        return Err(Error::CoordMixed("s_embed expects a plain Jacobian class"));
    }
    Ok(y.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobian::ModelConfig;

    fn ring(g: u32, d: u32) -> JacobianRing {
        JacobianRing::new(ModelConfig::new(g, d)).unwrap()
    }

    fn ring_pts(g: u32, d: u32, pts: &[&str]) -> JacobianRing {
        JacobianRing::new(ModelConfig::new(g, d).with_points(pts.iter().copied())).unwrap()
    }

    #[test]
    fn curve_class_small_cases() {
        let jac = ring(2, 0);
        let expect = jac.gen_c(2).add(&jac.gen_c(3)).add(&class_l(&jac));
        assert!(class_c(&jac).unwrap().sub(&expect).is_zero());

        // at d = 1 the psi order is 2: E = 1 + psi x and (E-1)/psi = x + psi x^[2]
        let jac = ring(2, 1);
        let got = class_c(&jac).unwrap();
        let x = class_l(&jac);
        let x2 = Element::var(jac.table(), Var::X, 2);
        let e = jac.one().add(&jac.psi().mul(&x).unwrap());
        let em1 = x.add(&jac.psi().mul(&x2).unwrap());
        let expect = jac.curve_class().mul(&e).unwrap().add(&em1);
        assert!(got.sub(&expect).is_zero());
    }

    #[test]
    fn divisor_variable_round_trips() {
        for (g, d) in [(1u32, 0u32), (2, 0), (2, 1), (2, 2), (3, 1)] {
            let jac = ring(g, d);
            let x = class_l(&jac);
            let back = u_to_x(&jac, &x_to_u(&jac, &x).unwrap()).unwrap();
            assert!(back.sub(&x).is_zero(), "x round trip at g={g} d={d}");

            let u = Element::var(jac.table(), Var::U, 1);
            let there = x_to_u(&jac, &u_to_x(&jac, &u).unwrap()).unwrap();
            assert!(there.sub(&u).is_zero(), "u round trip at g={g} d={d}");

            let probe = class_c(&jac).unwrap();
            let both = u_to_x(&jac, &x_to_u(&jac, &probe).unwrap()).unwrap();
            assert!(both.sub(&probe).is_zero(), "curve round trip at g={g} d={d}");
        }
    }

    #[test]
    fn divisor_closed_form_matches_variable() {
        for (g, d) in [(1u32, 1u32), (2, 0), (2, 1), (2, 2), (3, 2)] {
            let jac = ring(g, d);
            let diff = l_closed_form(&jac).unwrap().sub(&class_l(&jac));
            assert!(diff.is_zero(), "log form of divisor at g={g} d={d}");
        }
    }

    #[test]
    fn divisor_image_in_u_coordinates() {
        let jac = ring(2, 0);
        let img = x_to_u(&jac, &class_l(&jac)).unwrap();
        assert_eq!(format!("{img}"), "u - c2 - c3");
    }

    #[test]
    fn symmetric_powers_are_divided_powers_of_curve() {
        for (g, d) in [(2u32, 0u32), (2, 1), (3, 1)] {
            let jac = ring(g, d);
            let c = class_c(&jac).unwrap();
            for n in 0..=(2 * g + d).min(6) {
                let lhs = class_cn(&jac, n).unwrap();
                let rhs = c.divided_power(n).unwrap();
                assert!(lhs.sub(&rhs).is_zero(), "n={n} at g={g} d={d}");
            }
        }
    }

    #[test]
    fn section_image_properties() {
        for (g, d) in [(1u32, 0u32), (1, 1), (2, 0), (2, 1), (3, 0)] {
            let jac = ring(g, d);
            let gamma = class_gamma(&jac).unwrap();
            assert!(
                sigma_push(&gamma).sub(&jac.jac_fundamental()).is_zero(),
                "zero-section pushforward at g={g} d={d}"
            );
            assert!(
                xi_cap(&gamma).is_zero(),
                "divisor cap kills section image at g={g} d={d}"
            );
        }
    }

    #[test]
    fn section_image_from_push_maps() {
        for (g, d) in [(1u32, 1u32), (2, 0), (2, 1), (3, 0)] {
            let jac = ring(g, d);
            let gamma = class_gamma(&jac).unwrap();
            for n in 2..=4 {
                let alt = class_gamma_from_push(&jac, n).unwrap();
                assert!(alt.sub(&gamma).is_zero(), "n={n} at g={g} d={d}");
            }
        }
    }

    #[test]
    fn push_scaling_laws() {
        let jac = ring(2, 1);
        let c = class_c(&jac).unwrap();
        let one = jac.one();
        assert!(push_n_inf(&c, 1).unwrap().sub(&c).is_zero());
        assert!(push_n_inf(&one, 5).unwrap().sub(&one).is_zero());

        // ring map: push of a product is the product of pushes
        let a = c.mul(&c).unwrap();
        let lhs = push_n_inf(&a, 3).unwrap();
        let p = push_n_inf(&c, 3).unwrap();
        let rhs = p.mul(&p).unwrap();
        assert!(lhs.sub(&rhs).is_zero());

        // compatibility with the Jacobian push on divisor-constant classes
        let y = jac.curve_class().mul(&jac.gen_c(2)).unwrap();
        let lhs = push_n_inf(&s_embed(&y).unwrap(), 2).unwrap();
        let rhs = jac.push_n(&y, 2);
        assert!(lhs.sub(&rhs).is_zero());

        // the zero-section pullback picks out the push-invariant part
        let pushed = push_n_inf(&c, 2).unwrap();
        assert!(sigma_push(&pushed)
            .sub(&jac.push_n(&jac.curve_class(), 2))
            .is_zero());
    }

    #[test]
    fn curve_components_match_closed_forms() {
        for (g, d) in [(2u32, 0u32), (2, 1), (3, 0), (3, 1)] {
            let jac = ring(g, d);
            let c = class_c(&jac).unwrap();
            let mut recovered = jac.zero();
            for j in curve_component_range(&jac) {
                let comp = component_inf(&c, 1, j);
                let form = curve_component_form(&jac, j).unwrap();
                assert!(comp.sub(&form).is_zero(), "component j={j} at g={g} d={d}");
                recovered = recovered.add(&comp);
            }
            assert!(recovered.sub(&c).is_zero(), "components exhaust the class");
            let jm1 = component_inf(&c, 1, -1);
            assert!(jm1.sub(&class_l(&jac)).is_zero(), "lowest component is L");
        }
    }

    #[test]
    fn point_images() {
        let jac = ring_pts(2, 1, &["p"]);
        let spec = ClassSpec::Point("p".into());
        let f = fa_of_spec(&jac, &spec).unwrap();
        // a declared point pulls back to zero at the base point, so its image
        // is iota(p) * exp(psi x) with no divided correction
        let expect = jac
            .iota_part(&spec)
            .unwrap()
            .mul(&e_of_x(&jac).unwrap())
            .unwrap();
        assert!(f.sub(&expect).is_zero());

        // the base point carries the -psi correction
        let f0 = fa_of_spec(&jac, &ClassSpec::BasePoint).unwrap();
        let expect0 = jac
            .iota_part(&ClassSpec::BasePoint)
            .unwrap()
            .mul(&e_of_x(&jac).unwrap())
            .unwrap()
            .sub(&jac.psi().mul(&em1_of_x(&jac).unwrap()).unwrap());
        assert!(f0.sub(&expect0).is_zero());

        // the curve itself reproduces the curve class
        let fc = fa_of_spec(&jac, &ClassSpec::Curve).unwrap();
        assert!(fc.sub(&class_c(&jac).unwrap()).is_zero());
    }

    #[test]
    fn fa_rejects_classes_off_the_psi_line() {
        let jac = ring(2, 1);
        let bad = jac.gen_c(2);
        let err = fa_build(&jac, &jac.one(), &bad);
        assert!(err.is_err());
    }

    #[test]
    fn derivation_property_of_divisor_cap() {
        let jac = ring(2, 1);
        let a = class_c(&jac).unwrap();
        let b = class_gamma(&jac).unwrap();
        let lhs = xi_cap(&a.mul(&b).unwrap());
        let rhs = xi_cap(&a).mul(&b).unwrap().add(&a.mul(&xi_cap(&b)).unwrap());
        assert!(lhs.sub(&rhs).is_zero());
    }
}
