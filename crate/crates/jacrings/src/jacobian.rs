//! The Jacobian ring `A`: a windowed free Pontryagin algebra modeling the
//! Chow homology of a relative Jacobian, with two distinguished generator
//! systems and an exact dictionary between them.
//!
//! Coweight basis: `psi` (dim -1), curve generators `c2..c_{2g}` (dim 1,
//! coweight k), and per declared point `a_{p,j}` (dim 0, coweight j,
//! `1 <= j <= min(2g, g+d)`). Coweight `w` means multiplication-by-N
//! pushforward scales the generator by `N^w`.
//!
//! Grade basis: `delta_n` (curve) and `delta_{p,n}` (points), defined from the
//! coweight basis by the Stirling rows `delta_n = n! * sum_m S(m,n) cw_m`,
//! inverted triangularly. The grade of an element controls the induced
//! filtration: a pure-grade-n element is a sum of coweights >= n, and
//! `fil_component(., m)` is the grade->= m part.
//!
//! Invariants:
//! - both tables share one window; both directions of the dictionary compose
//!   to the identity exactly (window truncation is consistent on both sides);
//! - `[N]`-pushforward is a ring map, multiplicative in N.

use crate::algebra::{Element, GenKind, GenTable, Generator, Grading, Window};
use crate::combin::{factorial, stirling2, Int, Rat};
use crate::series;
use crate::{Error, Result};
use num_traits::One;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

/// Model parameters: genus, base dimension, declared points, optional u-cap.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub g: u32,
    pub d: u32,
    pub points: Vec<String>,
    pub u_cap: Option<u32>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            g: 2,
            d: 0,
            points: Vec::new(),
            u_cap: None,
        }
    }
}

impl ModelConfig {
    pub fn new(g: u32, d: u32) -> Self {
        ModelConfig {
            g,
            d,
            ..Default::default()
        }
    }

    pub fn with_points<S: Into<String>>(mut self, points: impl IntoIterator<Item = S>) -> Self {
        self.points = points.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_u_cap(mut self, cap: Option<u32>) -> Self {
        self.u_cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=5).contains(&self.g) {
            return Err(Error::Config(format!("genus g={} outside 1..=5", self.g)));
        }
        if self.d > 2 {
            return Err(Error::Config(format!(
                "base dimension d={} outside 0..=2",
                self.d
            )));
        }
        for p in &self.points {
            if p == "p0" {
                return Err(Error::Config("point name `p0` is reserved".into()));
            }
            if p.is_empty()
                || !p.chars().next().unwrap().is_ascii_alphabetic()
                || !p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(Error::Config(format!("bad point name `{p}`")));
            }
            if self.points.iter().filter(|q| *q == p).count() > 1 {
                return Err(Error::Config(format!("duplicate point `{p}`")));
            }
        }
        Ok(())
    }

    /// Largest declared point coweight: `min(2g, g+d)`.
    pub fn point_coweight_max(&self) -> u32 {
        (2 * self.g).min(self.g + self.d)
    }

    pub fn window(&self) -> Window {
        Window {
            g: self.g,
            d: self.d,
            u_cap: self.u_cap,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "g": self.g,
            "d": self.d,
            "points": self.points,
            "u_cap": self.u_cap,
        })
    }
}

/// A class on the curve one can take diagonals and embeddings of.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClassSpec {
    /// The full curve `[C]`.
    Curve,
    /// A declared point.
    Point(String),
    /// The base point `p0` (self-intersection `-psi`).
    BasePoint,
}

impl ClassSpec {
    pub fn label(&self) -> String {
        match self {
            ClassSpec::Curve => "curve".into(),
            ClassSpec::Point(p) => format!("point {p}"),
            ClassSpec::BasePoint => "p0".into(),
        }
    }
}

/// The Jacobian ring with both generator systems and the dictionary.
#[derive(Debug)]
pub struct JacobianRing {
    config: ModelConfig,
    cw: Arc<GenTable>,
    gr: Arc<GenTable>,
    /// Row per coweight-table generator: its expansion over the grade table.
    rows_to_grade: Vec<Element>,
    /// Row per grade-table generator: its expansion over the coweight table.
    rows_to_coweight: Vec<Element>,
    /// Cache of `w_k = gamma_k(curve_class)`.
    w_cache: Mutex<Vec<Element>>,
}

impl JacobianRing {
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let g = config.g;
        let window = config.window();
        let amax = config.point_coweight_max();

        let mut cw_gens = vec![Generator {
            name: "psi".into(),
            dim: -1,
            coweight: 0,
            grade: 0,
            kind: GenKind::Psi,
        }];
        for k in 2..=2 * g {
            cw_gens.push(Generator {
                name: format!("c{k}"),
                dim: 1,
                coweight: k,
                grade: 0,
                kind: GenKind::CurveCw(k),
            });
        }
        for (pi, p) in config.points.iter().enumerate() {
            for j in 1..=amax {
                cw_gens.push(Generator {
                    name: format!("a_{p}_{j}"),
                    dim: 0,
                    coweight: j,
                    grade: 0,
                    kind: GenKind::PointCw { point: pi, j },
                });
            }
        }
        let cw = GenTable::new(cw_gens, window)?;

        let mut gr_gens = vec![Generator {
            name: "psi".into(),
            dim: -1,
            coweight: 0,
            grade: 0,
            kind: GenKind::Psi,
        }];
        for n in 2..=2 * g {
            gr_gens.push(Generator {
                name: format!("delta{n}"),
                dim: 1,
                // leading coweight: the Stirling row starts at c_n
                coweight: n,
                grade: n,
                kind: GenKind::CurveGr(n),
            });
        }
        for (pi, p) in config.points.iter().enumerate() {
            for n in 1..=amax {
                gr_gens.push(Generator {
                    name: format!("delta_{p}_{n}"),
                    dim: 0,
                    coweight: n,
                    grade: n,
                    kind: GenKind::PointGr { point: pi, n },
                });
            }
        }
        let gr = GenTable::new(gr_gens, window)?;

        let rows_to_coweight = Self::build_rows_to_coweight(&cw, &gr);
        let rows_to_grade = Self::build_rows_to_grade(&cw, &gr, &rows_to_coweight)?;

        Ok(JacobianRing {
            config,
            cw,
            gr,
            rows_to_grade,
            rows_to_coweight,
            w_cache: Mutex::new(vec![]),
        })
    }

    /// Stirling rows: each grade generator as a coweight-basis element,
    /// `delta_n = n! * sum_{m >= n} S(m, n) cw_m`.
    fn build_rows_to_coweight(cw: &Arc<GenTable>, gr: &Arc<GenTable>) -> Vec<Element> {
        gr.gens()
            .iter()
            .map(|gen| match &gen.kind {
                GenKind::Psi => Element::psi(cw),
                GenKind::CurveGr(n) => {
                    let mut acc = Element::zero(cw);
                    for m in *n..=u32::MAX {
                        let Some(idx) = cw.index_of(&format!("c{m}")) else {
                            break;
                        };
                        let coeff = factorial(*n) * stirling2(m, *n);
                        acc = acc.add(
                            &Element::generator(cw, idx).scale(&Rat::from_integer(coeff)),
                        );
                    }
                    acc
                }
                GenKind::PointGr { point, n } => {
                    let mut acc = Element::zero(cw);
                    for m in *n..=u32::MAX {
                        let name = match cw.gens().iter().find(|h| {
                            matches!(&h.kind, GenKind::PointCw { point: q, j } if q == point && *j == m)
                        }) {
                            Some(h) => h.name.clone(),
                            None => break,
                        };
                        let idx = cw.index_of(&name).unwrap();
                        let coeff = factorial(*n) * stirling2(m, *n);
                        acc = acc.add(
                            &Element::generator(cw, idx).scale(&Rat::from_integer(coeff)),
                        );
                    }
                    acc
                }
                _ => unreachable!("grade table holds only psi and grade generators"),
            })
            .collect()
    }

    /// Triangular inversion: each coweight generator as a grade-basis element,
    /// solved downward from the top coweight.
    fn build_rows_to_grade(
        cw: &Arc<GenTable>,
        gr: &Arc<GenTable>,
        _rows_to_coweight: &[Element],
    ) -> Result<Vec<Element>> {
        let mut rows: Vec<Element> = vec![Element::zero(gr); cw.len()];

        // curve family: c_m = (delta_m - m! sum_{m' > m} S(m', m) c_{m'}) / m!
        let mut curve_ms: Vec<u32> = cw
            .gens()
            .iter()
            .filter_map(|g| match g.kind {
                GenKind::CurveCw(m) => Some(m),
                _ => None,
            })
            .collect();
        curve_ms.sort_unstable();
        for &m in curve_ms.iter().rev() {
            let didx = gr.index_of(&format!("delta{m}")).unwrap();
            let mut acc = Element::generator(gr, didx);
            for &m2 in curve_ms.iter().filter(|&&m2| m2 > m) {
                let c_m2 = &rows[cw.index_of(&format!("c{m2}")).unwrap()];
                let coeff = factorial(m) * stirling2(m2, m);
                acc = acc.sub(&c_m2.scale(&Rat::from_integer(coeff)));
            }
            let idx = cw.index_of(&format!("c{m}")).unwrap();
            rows[idx] = acc.scale(&Rat::new(Int::one(), factorial(m)));
        }

        // point families, same triangle per point
        let points: Vec<usize> = {
            let mut v: Vec<usize> = cw
                .gens()
                .iter()
                .filter_map(|g| match g.kind {
                    GenKind::PointCw { point, .. } => Some(point),
                    _ => None,
                })
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        for p in points {
            let mut js: Vec<u32> = cw
                .gens()
                .iter()
                .filter_map(|g| match g.kind {
                    GenKind::PointCw { point, j } if point == p => Some(j),
                    _ => None,
                })
                .collect();
            js.sort_unstable();
            for &j in js.iter().rev() {
                let didx = gr
                    .gens()
                    .iter()
                    .position(|h| {
                        matches!(h.kind, GenKind::PointGr { point, n } if point == p && n == j)
                    })
                    .unwrap();
                let mut acc = Element::generator(gr, didx);
                for &j2 in js.iter().filter(|&&j2| j2 > j) {
                    let aidx = cw
                        .gens()
                        .iter()
                        .position(|h| {
                            matches!(h.kind, GenKind::PointCw { point, j: jj } if point == p && jj == j2)
                        })
                        .unwrap();
                    let coeff = factorial(j) * stirling2(j2, j);
                    acc = acc.sub(&rows[aidx].scale(&Rat::from_integer(coeff)));
                }
                let aidx = cw
                    .gens()
                    .iter()
                    .position(|h| {
                        matches!(h.kind, GenKind::PointCw { point, j: jj } if point == p && jj == j)
                    })
                    .unwrap();
                rows[aidx] = acc.scale(&Rat::new(Int::one(), factorial(j)));
            }
        }

        // psi maps to psi
        if let Some(pi) = cw.psi_index() {
            rows[pi] = Element::psi(gr);
        }
        Ok(rows)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    /// The coweight-basis table (the default basis for elements of `A`).
    pub fn table(&self) -> &Arc<GenTable> {
        &self.cw
    }

    /// The grade-basis table.
    pub fn grade_table(&self) -> &Arc<GenTable> {
        &self.gr
    }

    pub fn psi(&self) -> Element {
        Element::psi(&self.cw)
    }

    pub fn one(&self) -> Element {
        Element::one(&self.cw)
    }

    pub fn zero(&self) -> Element {
        Element::zero(&self.cw)
    }

    /// `c_k`; identically zero when the window kills it or `k` is undeclared.
    pub fn gen_c(&self, k: u32) -> Element {
        match self.cw.index_of(&format!("c{k}")) {
            Some(i) => Element::generator(&self.cw, i),
            None => Element::zero(&self.cw),
        }
    }

    /// `a_{p,j}`; errors on unknown points, zero on out-of-range `j`.
    pub fn gen_a(&self, point: &str, j: u32) -> Result<Element> {
        if !self.config.points.iter().any(|p| p == point) {
            return Err(Error::UnknownPoint(point.into()));
        }
        Ok(match self.cw.index_of(&format!("a_{point}_{j}")) {
            Some(i) => Element::generator(&self.cw, i),
            None => Element::zero(&self.cw),
        })
    }

    /// The curve class `c = sum_k c_k` (the coweight->= 2 part of `s(iota[C])`).
    pub fn curve_class(&self) -> Element {
        let mut acc = Element::zero(&self.cw);
        for k in 2..=2 * self.config.g {
            acc = acc.add(&self.gen_c(k));
        }
        acc
    }

    /// `w_k = gamma_k(curve_class)`, the class of the k-th symmetric power
    /// image; cached.
    pub fn w_class(&self, k: u32) -> Element {
        {
            let cache = self.w_cache.lock().unwrap();
            if let Some(e) = cache.get(k as usize) {
                return e.clone();
            }
        }
        let c = self.curve_class();
        let mut cache = self.w_cache.lock().unwrap();
        while cache.len() <= k as usize {
            let next = if cache.is_empty() {
                self.one()
            } else {
                let k0 = cache.len() as u32;
                cache[k0 as usize - 1].mul(&c).unwrap().div_int(k0)
            };
            cache.push(next);
        }
        cache[k as usize].clone()
    }

    /// The fundamental class `[J] = gamma_g(curve_class)`.
    pub fn jac_fundamental(&self) -> Element {
        self.w_class(self.config.g)
    }

    /// Embedded point class `[iota(p)] = 1 + sum_j a_{p,j}`.
    pub fn iota_point(&self, point: &str) -> Result<Element> {
        let mut acc = self.one();
        for j in 1..=self.config.point_coweight_max() {
            acc = acc.add(&self.gen_a(point, j)?);
        }
        Ok(acc)
    }

    /// Embedded class of a spec: curve class, point class, or the unit for
    /// the base point.
    pub fn iota_part(&self, spec: &ClassSpec) -> Result<Element> {
        match spec {
            ClassSpec::Curve => Ok(self.curve_class()),
            ClassSpec::Point(p) => self.iota_point(p),
            ClassSpec::BasePoint => Ok(self.one()),
        }
    }

    /// Base-point pullback of a spec class: `p0^*[C] = 1`, `p0^*[p] = 0` for
    /// declared points, `p0^*[p0] = -psi`.
    pub fn p0_pull(&self, spec: &ClassSpec) -> Element {
        match spec {
            ClassSpec::Curve => self.one(),
            ClassSpec::Point(_) => self.zero(),
            ClassSpec::BasePoint => self.psi().neg(),
        }
    }

    /// `[N]`-pushforward: scales a coweight-`w` monomial by `N^w`.
    pub fn push_n(&self, a: &Element, n: i64) -> Element {
        let mut out = Element::zero(&self.cw);
        let nn = Int::from(n);
        for (m, c) in a.iter() {
            let w = Element::grading_of(&self.cw, m, Grading::Coweight);
            debug_assert!(w >= 0);
            let scale = if w == 0 {
                Int::one()
            } else {
                nn.pow(w as u32)
            };
            out = out.add(&Element::term(
                &self.cw,
                m.clone(),
                c * Rat::from_integer(scale),
            ));
        }
        out
    }

    /// Rewrites a coweight-basis element in the grade basis.
    pub fn to_grade_basis(&self, a: &Element) -> Result<Element> {
        a.transport(&self.gr, &self.rows_to_grade)
    }

    /// Rewrites a grade-basis element in the coweight basis.
    pub fn to_coweight_basis(&self, z: &Element) -> Result<Element> {
        z.transport(&self.cw, &self.rows_to_coweight)
    }

    /// Splits into grade components, returned in the coweight basis.
    pub fn grade_split(&self, a: &Element) -> Result<BTreeMap<i64, Element>> {
        let z = self.to_grade_basis(a)?;
        let mut out = BTreeMap::new();
        for (n, part) in z.grade_split(Grading::Grade) {
            let back = self.to_coweight_basis(&part)?;
            if !back.is_zero() {
                out.insert(n, back);
            }
        }
        Ok(out)
    }

    /// The grade-`n` component, in the coweight basis.
    pub fn grade_part(&self, a: &Element, n: i64) -> Result<Element> {
        let z = self.to_grade_basis(a)?;
        self.to_coweight_basis(&z.grade_component(Grading::Grade, n))
    }

    /// Filtration component: the sum of grade parts `>= m`.
    pub fn fil_component(&self, a: &Element, m: i64) -> Result<Element> {
        let mut acc = Element::zero(&self.cw);
        for (n, part) in self.grade_split(a)? {
            if n >= m {
                acc = acc.add(&part);
            }
        }
        Ok(acc)
    }

    /// The `(dim, coweight) = (i, 2i+j)` component (eigencomponent of `[N]`).
    pub fn component(&self, a: &Element, i: i64, j: i64) -> Element {
        let mut out = Element::zero(&self.cw);
        for (m, c) in a.iter() {
            let dim = Element::grading_of(&self.cw, m, Grading::Dimension);
            let cw = Element::grading_of(&self.cw, m, Grading::Coweight);
            if dim == i && cw == 2 * i + j {
                out = out.add(&Element::term(&self.cw, m.clone(), c.clone()));
            }
        }
        out
    }

    /// `(1 + psi*c)^n` over the coweight basis, any integer `n`.
    pub fn one_plus_psi_c_pow(&self, n: i64) -> Result<Element> {
        series::one_plus_psi_pow(&self.curve_class(), n)
    }

    /// Serialized generator tables and dictionary rows, for reports.
    pub fn tables_json(&self) -> Value {
        let dump = |t: &Arc<GenTable>| -> Value {
            Value::Array(
                t.gens()
                    .iter()
                    .map(|g| {
                        json!({
                            "name": g.name,
                            "dim": g.dim,
                            "coweight": g.coweight,
                            "grade": g.grade,
                        })
                    })
                    .collect(),
            )
        };
        let rows: Vec<Value> = self
            .gr
            .gens()
            .iter()
            .zip(&self.rows_to_coweight)
            .filter(|(g, _)| !matches!(g.kind, GenKind::Psi))
            .map(|(g, row)| json!({ "grade_generator": g.name, "coweight_expansion": row.to_string() }))
            .collect();
        json!({
            "coweight_basis": dump(&self.cw),
            "grade_basis": dump(&self.gr),
            "dictionary": rows,
        })
    }
}
