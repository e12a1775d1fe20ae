//! Windowed divided-power polynomial algebra over Q.
//!
//! Elements are finite sums of monomials `q * prod(gen_i^e_i) * t^r * u^[a] * x^[b]`
//! over a declared generator table. `t` is an ordinary polynomial variable;
//! `u` and `x` are divided-power variables (`u^[a]*u^[b] = C(a+b,a)*u^[a+b]`).
//!
//! Representation:
//! - sparse `BTreeMap<Monomial, Rat>` with no zero coefficients stored;
//! - monomials own dense generator exponent vectors indexed by the table;
//! - term order is lexicographic on `(x, u, t, generator exponents)`.
//!
//! Invariants:
//! - every stored monomial is admissible for the table's window; arithmetic
//!   truncates inadmissible terms eagerly (the inadmissible span is an ideal,
//!   so truncation is a ring quotient);
//! - admissibility constrains only the generator part of a monomial, never the
//!   `t`/`u`/`x` exponents; an optional `u_cap` additionally truncates high
//!   `u` indices and counts every such hit on the table;
//! - no element mixes `u` and `x` monomials (coordinate purity).

use crate::combin::{binom, factorial, fmt_rat, parse_rat, Int, Rat};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// What a generator stands for; drives dictionary construction and printing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenKind {
    /// The base class `psi` (dimension -1, coweight 0).
    Psi,
    /// Coweight generator `c_k` of the curve, `k >= 2`.
    CurveCw(u32),
    /// Coweight generator `a_{p,j}` of a declared point (index into the
    /// model's point list).
    PointCw { point: usize, j: u32 },
    /// Grade generator `delta_n` of the curve.
    CurveGr(u32),
    /// Grade generator `delta_{p,n}` of a declared point.
    PointGr { point: usize, n: u32 },
}

/// A declared base generator with its multigrade.
#[derive(Debug, Clone)]
pub struct Generator {
    pub name: String,
    pub dim: i64,
    pub coweight: u32,
    pub grade: u32,
    pub kind: GenKind,
}

/// Admissibility window for genus `g` over a base of dimension `d`.
///
/// A generator monomial with total dimension `dim`, total coweight `cw` and
/// psi-exponent `e` is admissible iff
/// `-d <= dim <= g`, `max(dim, 0) <= cw <= min(2g, g+d+dim)` and
/// `e < min(g, d+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub g: u32,
    pub d: u32,
    /// Optional hard bound on `u` indices; `None` leaves `u` unbounded.
    pub u_cap: Option<u32>,
}

impl Window {
    /// Nilpotency order of `psi`: `psi^k = 0` for `k >= min(g, d+1)`.
    pub fn psi_order(&self) -> u32 {
        self.g.min(self.d + 1)
    }

    /// Admissibility of a generator part (dimension, coweight, psi exponent).
    pub fn admits(&self, dim: i64, cw: i64, psi_exp: u32) -> bool {
        let g = self.g as i64;
        let d = self.d as i64;
        psi_exp < self.psi_order()
            && dim <= g
            && dim >= -d
            && cw <= (2 * g).min(g + d + dim)
            && cw >= dim.max(0)
    }
}

/// Shared generator table: declared generators plus the active window.
#[derive(Debug)]
pub struct GenTable {
    gens: Vec<Generator>,
    window: Window,
    psi: Option<usize>,
    cap_hits: AtomicU64,
}

impl GenTable {
    /// Validates descriptors and builds a shared table.
    pub fn new(gens: Vec<Generator>, window: Window) -> Result<Arc<Self>> {
        let mut psi = None;
        let mut names: Vec<&str> = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            if g.name.is_empty()
                || !g.name.chars().next().unwrap().is_ascii_alphabetic()
                || !g.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(Error::Config(format!("bad generator name `{}`", g.name)));
            }
            if ["t", "u", "x"].contains(&g.name.as_str()) || names.contains(&g.name.as_str()) {
                return Err(Error::Config(format!("duplicate/reserved name `{}`", g.name)));
            }
            names.push(&g.name);
            if matches!(g.kind, GenKind::Psi) {
                if psi.is_some() {
                    return Err(Error::Config("two psi generators".into()));
                }
                if g.dim != -1 || g.coweight != 0 || g.grade != 0 {
                    return Err(Error::Config("psi must have multigrade (-1, 0, 0)".into()));
                }
                psi = Some(i);
            } else if g.coweight == 0 {
                // series termination relies on every non-psi generator raising
                // the (window-bounded) coweight
                return Err(Error::Config(format!(
                    "generator `{}` must have positive coweight",
                    g.name
                )));
            }
        }
        Ok(Arc::new(GenTable {
            gens,
            window,
            psi,
            cap_hits: AtomicU64::new(0),
        }))
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Index of the psi generator, if declared.
    pub fn psi_index(&self) -> Option<usize> {
        self.psi
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    /// Total `u_cap` truncations recorded on this table so far.
    pub fn cap_hits(&self) -> u64 {
        self.cap_hits.load(Ordering::Relaxed)
    }

    pub fn reset_cap_hits(&self) {
        self.cap_hits.store(0, Ordering::Relaxed);
    }

    fn add_cap_hits(&self, n: u64) {
        if n > 0 {
            self.cap_hits.fetch_add(n, Ordering::Relaxed);
        }
    }

    /// Dimension, coweight and psi exponent of a generator exponent vector.
    fn gen_part(&self, exps: &[u32]) -> (i64, i64, u32) {
        let mut dim = 0i64;
        let mut cw = 0i64;
        let mut psi = 0u32;
        for (i, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let g = &self.gens[i];
            dim += g.dim * e as i64;
            cw += g.coweight as i64 * e as i64;
            if Some(i) == self.psi {
                psi += e;
            }
        }
        (dim, cw, psi)
    }

    /// Window admissibility of a monomial's generator part.
    pub fn admits(&self, m: &Monomial) -> bool {
        let (dim, cw, psi) = self.gen_part(&m.gens);
        self.window.admits(dim, cw, psi)
    }
}

/// Which formal variable an operation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    U,
    X,
}

/// Gradings a monomial carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    /// Total homological dimension: generator dims plus `u + x`.
    Dimension,
    /// Total coweight: generator coweights plus `u + x`.
    Coweight,
    /// Declared grade of the generator part only.
    Grade,
    /// `t + u` exponent sum.
    TUDegree,
}

/// A monomial: generator exponents (dense, table-indexed) and the three
/// variable exponents. `u` and `x` are divided-power indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub x: u32,
    pub u: u32,
    pub t: u32,
    pub gens: Vec<u32>,
}

impl Monomial {
    pub fn unit(table: &GenTable) -> Self {
        Monomial {
            x: 0,
            u: 0,
            t: 0,
            gens: vec![0; table.len()],
        }
    }

    pub fn is_unit(&self) -> bool {
        self.x == 0 && self.u == 0 && self.t == 0 && self.gens.iter().all(|&e| e == 0)
    }
}

/// A windowed divided-power polynomial.
#[derive(Debug, Clone)]
pub struct Element {
    table: Arc<GenTable>,
    terms: BTreeMap<Monomial, Rat>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}
impl Eq for Element {}

/// Coordinate flavor of an element: divided powers in `u`, in `x`, or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordKind {
    Neutral,
    U,
    X,
}

impl Element {
    pub fn zero(table: &Arc<GenTable>) -> Self {
        Element {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(table: &Arc<GenTable>) -> Self {
        Self::scalar(table, Rat::one())
    }

    pub fn scalar(table: &Arc<GenTable>, r: Rat) -> Self {
        let mut e = Self::zero(table);
        if !r.is_zero() {
            e.terms.insert(Monomial::unit(table), r);
        }
        e
    }

    pub fn from_int(table: &Arc<GenTable>, n: i64) -> Self {
        Self::scalar(table, Rat::from_integer(Int::from(n)))
    }

    /// The generator with the given table index, as an element.
    pub fn generator(table: &Arc<GenTable>, idx: usize) -> Self {
        let mut m = Monomial::unit(table);
        m.gens[idx] += 1;
        Self::term(table, m, Rat::one())
    }

    /// The psi generator; zero when the window kills it (field mode).
    pub fn psi(table: &Arc<GenTable>) -> Self {
        match table.psi_index() {
            Some(i) => Self::generator(table, i),
            None => Self::zero(table),
        }
    }

    /// `t^r`, `u^[a]` or `x^[b]`.
    pub fn var(table: &Arc<GenTable>, v: Var, exp: u32) -> Self {
        let mut m = Monomial::unit(table);
        match v {
            Var::T => m.t = exp,
            Var::U => m.u = exp,
            Var::X => m.x = exp,
        }
        Self::term(table, m, Rat::one())
    }

    /// Single-term element (window-truncated).
    pub fn term(table: &Arc<GenTable>, mono: Monomial, coeff: Rat) -> Self {
        let mut e = Self::zero(table);
        let mut hits = 0;
        e.insert(mono, coeff, &mut hits);
        table.add_cap_hits(hits);
        e
    }

    pub fn table(&self) -> &Arc<GenTable> {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    /// Coefficient of a monomial (zero if absent).
    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// The coefficient of the unit monomial.
    pub fn unit_coeff(&self) -> Rat {
        self.coeff(&Monomial::unit(&self.table))
    }

    /// Which divided-power variable the element carries.
    pub fn coord_kind(&self) -> CoordKind {
        // monomials sort by (x, u, ...): the last key is maximal
        match self.terms.keys().next_back() {
            None => CoordKind::Neutral,
            Some(m) if m.x > 0 => CoordKind::X,
            Some(m) if m.u > 0 => CoordKind::U,
            _ => CoordKind::Neutral,
        }
    }

    fn insert(&mut self, mono: Monomial, coeff: Rat, cap_hits: &mut u64) {
        if coeff.is_zero() {
            return;
        }
        if let Some(cap) = self.table.window.u_cap {
            if mono.u > cap {
                *cap_hits += 1;
                return;
            }
        }
        if !self.table.admits(&mono) {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero(&self.table);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= r;
        }
        out
    }

    /// Division by a nonzero integer.
    pub fn div_int(&self, n: u32) -> Self {
        self.scale(&Rat::new(Int::one(), Int::from(n)))
    }

    fn check_compatible(&self, other: &Element, ctx: &'static str) {
        assert!(
            Arc::ptr_eq(&self.table, &other.table),
            "{ctx}: elements over different generator tables"
        );
    }

    /// Sum; panics if the operands mix `u` and `x` coordinates.
    pub fn add(&self, other: &Element) -> Element {
        self.check_compatible(other, "add");
        let ka = self.coord_kind();
        let kb = other.coord_kind();
        assert!(
            !(ka == CoordKind::U && kb == CoordKind::X)
                && !(ka == CoordKind::X && kb == CoordKind::U),
            "add: mixing u- and x-coordinate elements"
        );
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let mut hits = 0;
            out.insert(m.clone(), c.clone(), &mut hits);
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        self.scale(&-Rat::one())
    }

    fn mul_with(&self, other: &Element, cap_hits: &mut u64) -> Result<Element> {
        self.check_compatible(other, "mul");
        let mut out = Element::zero(&self.table);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if (ma.u > 0 && mb.x > 0) || (ma.x > 0 && mb.u > 0) {
                    return Err(Error::CoordMixed(
                        "product would mix u- and x-divided powers",
                    ));
                }
                let mut m = ma.clone();
                m.t += mb.t;
                m.u += mb.u;
                m.x += mb.x;
                for (i, e) in mb.gens.iter().enumerate() {
                    m.gens[i] += e;
                }
                let mut c = ca * cb;
                if ma.u > 0 && mb.u > 0 {
                    c *= Rat::from_integer(binom((ma.u + mb.u) as i64, ma.u));
                }
                if ma.x > 0 && mb.x > 0 {
                    c *= Rat::from_integer(binom((ma.x + mb.x) as i64, ma.x));
                }
                out.insert(m, c, cap_hits);
            }
        }
        Ok(out)
    }

    /// Product with divided-power contractions on `u` and `x`.
    pub fn mul(&self, other: &Element) -> Result<Element> {
        let mut hits = 0;
        let r = self.mul_with(other, &mut hits);
        self.table.add_cap_hits(hits);
        r
    }

    /// Ordinary power.
    pub fn pow(&self, k: u32) -> Result<Element> {
        let mut acc = Element::one(&self.table);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    fn divided_power_with(&self, m: u32, cap_hits: &mut u64) -> Result<Element> {
        if !self.unit_coeff().is_zero() {
            return Err(Error::UnitComponent);
        }
        // gamma_k = gamma_{k-1} * a / k, exact over Q
        let mut acc = Element::one(&self.table);
        for k in 1..=m {
            acc = acc.mul_with(self, cap_hits)?;
            acc = acc.div_int(k);
        }
        Ok(acc)
    }

    /// Divided power `gamma_m(self) = self^m / m!`; the argument must have no
    /// unit component.
    pub fn divided_power(&self, m: u32) -> Result<Element> {
        let mut hits = 0;
        let r = self.divided_power_with(m, &mut hits);
        self.table.add_cap_hits(hits);
        r
    }

    /// Substitution of an element for a variable: `t^r -> s^r` with ordinary
    /// powers, `u^[m] -> gamma_m(s)` and `x^[m] -> gamma_m(s)` with divided
    /// powers (so the result is again a ring map).
    ///
    /// For `u`/`x` the series must have no unit component. If a `u_cap` is set
    /// and this substitution truncates anything, it fails with `CapOverflow`
    /// rather than returning a silently capped answer.
    pub fn substitute(&self, var: Var, s: &Element) -> Result<Element> {
        self.check_compatible(s, "substitute");
        if var != Var::T && !s.unit_coeff().is_zero() {
            return Err(Error::UnitComponent);
        }
        let mut hits = 0u64;
        let max_exp = self
            .terms
            .keys()
            .map(|m| match var {
                Var::T => m.t,
                Var::U => m.u,
                Var::X => m.x,
            })
            .max()
            .unwrap_or(0);
        // powers[k] = s^k (plain for t) or gamma_k(s) (divided for u, x)
        let mut powers: Vec<Element> = Vec::with_capacity(max_exp as usize + 1);
        powers.push(Element::one(&self.table));
        for k in 1..=max_exp {
            let prev = powers.last().unwrap();
            let mut next = prev.mul_with(s, &mut hits)?;
            if var != Var::T {
                next = next.div_int(k);
            }
            powers.push(next);
        }
        let mut out = Element::zero(&self.table);
        for (m, c) in &self.terms {
            let (exp, mut rest) = match var {
                Var::T => (m.t, m.clone()),
                Var::U => (m.u, m.clone()),
                Var::X => (m.x, m.clone()),
            };
            match var {
                Var::T => rest.t = 0,
                Var::U => rest.u = 0,
                Var::X => rest.x = 0,
            }
            let base = Element::term(&self.table, rest, c.clone());
            let prod = base.mul_with(&powers[exp as usize], &mut hits)?;
            for (mm, cc) in prod.terms {
                out.insert(mm, cc, &mut hits);
            }
        }
        self.table.add_cap_hits(hits);
        if hits > 0 {
            if let Some(cap) = self.table.window.u_cap {
                return Err(Error::CapOverflow { cap });
            }
        }
        Ok(out)
    }

    /// Value of a grading on a monomial of this element's table.
    pub fn grading_of(table: &GenTable, m: &Monomial, grading: Grading) -> i64 {
        match grading {
            Grading::Dimension => {
                let (dim, _, _) = table.gen_part(&m.gens);
                dim + m.u as i64 + m.x as i64
            }
            Grading::Coweight => {
                let (_, cw, _) = table.gen_part(&m.gens);
                cw + m.u as i64 + m.x as i64
            }
            Grading::Grade => m
                .gens
                .iter()
                .enumerate()
                .map(|(i, &e)| table.gens[i].grade as i64 * e as i64)
                .sum(),
            Grading::TUDegree => m.t as i64 + m.u as i64,
        }
    }

    /// The part of the element in a single grading value.
    pub fn grade_component(&self, grading: Grading, value: i64) -> Element {
        let mut out = Element::zero(&self.table);
        for (m, c) in &self.terms {
            if Self::grading_of(&self.table, m, grading) == value {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Split into grading components (only nonzero ones appear).
    pub fn grade_split(&self, grading: Grading) -> BTreeMap<i64, Element> {
        let mut out: BTreeMap<i64, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = Self::grading_of(&self.table, m, grading);
            out.entry(v)
                .or_insert_with(|| Element::zero(&self.table))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Terms passing a monomial predicate (no re-windowing needed).
    pub fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> Element {
        let mut out = Element::zero(&self.table);
        for (m, c) in &self.terms {
            if keep(m) {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Splits terms by an arbitrary monomial key.
    pub fn split_by(&self, key: impl Fn(&Monomial) -> i64) -> BTreeMap<i64, Element> {
        let mut out: BTreeMap<i64, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(key(m))
                .or_insert_with(|| Element::zero(&self.table))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Rebuilds the element with each monomial rewritten (coefficient kept);
    /// rewritten monomials go through window truncation again.
    pub fn map_monomials(&self, f: impl Fn(&Monomial) -> Option<(Monomial, Rat)>) -> Element {
        let mut out = Element::zero(&self.table);
        let mut hits = 0;
        for (m, c) in &self.terms {
            if let Some((mm, factor)) = f(m) {
                out.insert(mm, c * factor, &mut hits);
            }
        }
        self.table.add_cap_hits(hits);
        out
    }

    /// Minimal psi exponent over the terms; `None` for the zero element.
    /// A nonzero difference with `min_psi_order() = Some(k)`, `k >= 1`, is an
    /// identity that holds modulo `psi^k`.
    pub fn min_psi_order(&self) -> Option<u32> {
        let pi = self.table.psi_index()?;
        self.terms.keys().map(|m| m.gens[pi]).min()
    }

    /// Rewrites this element over another table through one replacement
    /// element per source generator (`t`, `u`, `x` exponents carry over).
    /// Used for the coweight/grade dictionary transport.
    pub fn transport(&self, target: &Arc<GenTable>, rows: &[Element]) -> Result<Element> {
        assert_eq!(rows.len(), self.table.len(), "transport: wrong row count");
        let mut out = Element::zero(target);
        let mut hits = 0;
        // cache powers of each row as needed
        let mut pows: Vec<Vec<Element>> = rows
            .iter()
            .map(|r| vec![Element::one(target), r.clone()])
            .collect();
        for (m, c) in &self.terms {
            let mut vars = Monomial::unit(target);
            vars.t = m.t;
            vars.u = m.u;
            vars.x = m.x;
            let mut acc = Element::term(target, vars, c.clone());
            for (i, &e) in m.gens.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while pows[i].len() <= e as usize {
                    let next = pows[i].last().unwrap().mul_with(&rows[i], &mut hits)?;
                    pows[i].push(next);
                }
                acc = acc.mul_with(&pows[i][e as usize], &mut hits)?;
            }
            for (mm, cc) in acc.terms {
                out.insert(mm, cc, &mut hits);
            }
        }
        target.add_cap_hits(hits);
        Ok(out)
    }

    /// Canonical JSON: `{"terms": [{"coeff": "-3/2", "gens": {"c2": 1},
    /// "t": 0, "u": 3, "x": 0}, ...]}` in canonical term order (descending on
    /// `(x, u, t, exponents)`), coefficients as reduced `p` or `p/q` strings.
    pub fn to_json(&self) -> Value {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms.iter().rev() {
            let mut gens = Map::new();
            for (i, &e) in m.gens.iter().enumerate() {
                if e > 0 {
                    gens.insert(self.table.gens[i].name.clone(), json!(e));
                }
            }
            terms.push(json!({
                "coeff": fmt_rat(c),
                "gens": Value::Object(gens),
                "t": m.t,
                "u": m.u,
                "x": m.x,
            }));
        }
        json!({ "terms": terms })
    }

    /// Parses the canonical JSON form against a table.
    pub fn from_json(table: &Arc<GenTable>, v: &Value) -> Result<Element> {
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("missing `terms` array".into()))?;
        let mut out = Element::zero(table);
        let mut hits = 0;
        for t in terms {
            let coeff = parse_rat(
                t.get("coeff")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Json("missing `coeff`".into()))?,
            )?;
            let mut m = Monomial::unit(table);
            for (var, slot) in [("t", 0), ("u", 1), ("x", 2)] {
                let e = t.get(var).and_then(Value::as_u64).unwrap_or(0) as u32;
                match slot {
                    0 => m.t = e,
                    1 => m.u = e,
                    _ => m.x = e,
                }
            }
            if let Some(gens) = t.get("gens").and_then(Value::as_object) {
                for (name, exp) in gens {
                    let idx = table
                        .index_of(name)
                        .ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
                    m.gens[idx] = exp
                        .as_u64()
                        .ok_or_else(|| Error::Json(format!("bad exponent for `{name}`")))?
                        as u32;
                }
            }
            out.insert(m, coeff, &mut hits);
        }
        table.add_cap_hits(hits);
        Ok(out)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.gens.iter().enumerate() {
                if e == 1 {
                    factors.push(self.table.gens[i].name.clone());
                } else if e > 1 {
                    factors.push(format!("{}^{}", self.table.gens[i].name, e));
                }
            }
            if m.t == 1 {
                factors.push("t".into());
            } else if m.t > 1 {
                factors.push(format!("t^{}", m.t));
            }
            if m.u == 1 {
                factors.push("u".into());
            } else if m.u > 1 {
                factors.push(format!("u^[{}]", m.u));
            }
            if m.x == 1 {
                factors.push("x".into());
            } else if m.x > 1 {
                factors.push(format!("x^[{}]", m.x));
            }
            let abs = c.abs();
            let mut body = if factors.is_empty() {
                fmt_rat(&abs)
            } else if abs.is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", fmt_rat(&abs), factors.join("*"))
            };
            if idx == 0 {
                if c.is_negative() {
                    body = format!("-{body}");
                }
                write!(f, "{body}")?;
            } else if c.is_negative() {
                write!(f, " - {body}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for CoordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordKind::Neutral => write!(f, "neutral"),
            CoordKind::U => write!(f, "u"),
            CoordKind::X => write!(f, "x"),
        }
    }
}

/// Sum of a slice of elements over a common table.
pub fn sum(table: &Arc<GenTable>, parts: impl IntoIterator<Item = Element>) -> Element {
    let mut acc = Element::zero(table);
    for p in parts {
        acc = acc.add(&p);
    }
    acc
}

/// `factorial(m) * gamma_m` as a plain power check helper: `m! * x^[m]` equals
/// `x^m` for divided-power variables.
pub fn factorial_rat(n: u32) -> Rat {
    Rat::from_integer(factorial(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combin::{rat, rat_i};

    fn table(g: u32, d: u32) -> Arc<GenTable> {
        // psi + curve coweight generators c2..c_{2g}
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
    fn table_validation() {
        let w = Window {
            g: 2,
            d: 0,
            u_cap: None,
        };
        let bad = GenTable::new(
            vec![Generator {
                name: "t".into(),
                dim: 0,
                coweight: 1,
                grade: 0,
                kind: GenKind::CurveCw(2),
            }],
            w,
        );
        assert!(bad.is_err());
        let dup = GenTable::new(
            vec![
                Generator {
                    name: "a".into(),
                    dim: 0,
                    coweight: 1,
                    grade: 0,
                    kind: GenKind::CurveCw(2),
                },
                Generator {
                    name: "a".into(),
                    dim: 0,
                    coweight: 1,
                    grade: 0,
                    kind: GenKind::CurveCw(3),
                },
            ],
            w,
        );
        assert!(dup.is_err());
    }

    #[test]
    fn psi_nilpotency_and_dim_window() {
        // psi^(d+1) = 0 via dim < -d, and psi order min(g, d+1)
        for (g, d) in [(1, 0), (2, 0), (2, 1), (3, 2)] {
            let t = table(g, d);
            let psi = Element::psi(&t);
            let ord = t.window().psi_order();
            assert!(!psi.pow(ord.saturating_sub(1)).unwrap().is_zero() || ord <= 1);
            assert!(psi.pow(ord).unwrap().is_zero(), "psi^{ord} at g={g} d={d}");
        }
        // field mode: psi = 0 outright
        let t = table(2, 0);
        assert!(Element::psi(&t).pow(1).unwrap().is_zero());
    }

    #[test]
    fn dimension_window_kills_deep_products() {
        // c^(g+1) = 0: dimension g+1 > g
        for g in [1u32, 2, 3] {
            let t = table(g, 2);
            let c = sum(&t, (2..=2 * g).map(|k| gen(&t, &format!("c{k}"))));
            assert!(!c.pow(g).unwrap().is_zero());
            assert!(c.pow(g + 1).unwrap().is_zero());
        }
    }

    #[test]
    fn coweight_window_examples() {
        // evaluated example: psi*c2^g is zero in field mode, nonzero for d >= 1
        for g in [2u32, 3] {
            let t0 = table(g, 0);
            let p = Element::psi(&t0).mul(&gen(&t0, "c2").pow(g).unwrap()).unwrap();
            assert!(p.is_zero(), "field mode psi = 0");
            for d in [1u32, 2] {
                let t1 = table(g, d);
                let p = Element::psi(&t1).mul(&gen(&t1, "c2").pow(g).unwrap()).unwrap();
                assert!(!p.is_zero(), "admissible at g={g} d={d}");
            }
        }
        // cw upper bound: c4 alone dies at g=2, d=0 (cw 4 > min(4, 3))
        let t = table(2, 0);
        assert!(gen(&t, "c4").is_zero());
        let t = table(2, 1);
        assert!(!gen(&t, "c4").is_zero());
    }

    #[test]
    fn window_absorption_is_ideal() {
        // an inadmissible generator monomial times any generator stays
        // inadmissible (exhaustive over a box around the window)
        for (g, d) in [(1u32, 0u32), (1, 1), (2, 0), (2, 1), (2, 2)] {
            let t = table(g, d);
            let n = t.len();
            let bound = 2 * g + 2;
            let mut stack = vec![vec![0u32; n]];
            // enumerate exponent vectors with entries <= bound and total <= bound
            let mut all = Vec::new();
            while let Some(v) = stack.pop() {
                let total: u32 = v.iter().sum();
                if total > bound {
                    continue;
                }
                all.push(v.clone());
                for i in 0..n {
                    // unique paths: only bump i when everything right of i is 0
                    if v.iter().skip(i + 1).all(|&e| e == 0) {
                        let mut w = v.clone();
                        w[i] += 1;
                        if w[i] <= bound {
                            stack.push(w);
                        }
                    }
                }
            }
            for v in &all {
                let m = Monomial {
                    x: 0,
                    u: 0,
                    t: 0,
                    gens: v.clone(),
                };
                if t.admits(&m) {
                    continue;
                }
                for i in 0..n {
                    let mut w = m.clone();
                    w.gens[i] += 1;
                    assert!(
                        !t.admits(&w),
                        "absorption fails at g={g} d={d}: {:?} * gen {i}",
                        v
                    );
                }
            }
        }
    }

    #[test]
    fn divided_power_variables_multiply_binomially() {
        let t = table(2, 0);
        let u2 = Element::var(&t, Var::U, 2);
        let u3 = Element::var(&t, Var::U, 3);
        assert_eq!(
            u2.mul(&u3).unwrap(),
            Element::var(&t, Var::U, 5).scale(&rat_i(10))
        );
        let x1 = Element::var(&t, Var::X, 1);
        assert_eq!(
            x1.mul(&x1).unwrap(),
            Element::var(&t, Var::X, 2).scale(&rat_i(2))
        );
        // m! * v^[m] = v^m
        for m in 1..6u32 {
            let v = Element::var(&t, Var::U, 1).pow(m).unwrap();
            assert_eq!(
                v,
                Element::var(&t, Var::U, m).scale(&factorial_rat(m))
            );
        }
    }

    #[test]
    fn coordinate_purity_rejected() {
        let t = table(2, 0);
        let u = Element::var(&t, Var::U, 1);
        let x = Element::var(&t, Var::X, 1);
        assert!(matches!(u.mul(&x), Err(Error::CoordMixed(_))));
        assert_eq!(u.coord_kind(), CoordKind::U);
        assert_eq!(x.coord_kind(), CoordKind::X);
    }

    #[test]
    fn divided_power_of_elements() {
        // gamma_2(c2 + c3) at a window wide enough to keep all terms
        let t = table(3, 2);
        let s = gen(&t, "c2").add(&gen(&t, "c3"));
        let g2 = s.divided_power(2).unwrap();
        let expect = gen(&t, "c2")
            .pow(2)
            .unwrap()
            .scale(&rat(1, 2))
            .add(&gen(&t, "c2").mul(&gen(&t, "c3")).unwrap())
            .add(&gen(&t, "c3").pow(2).unwrap().scale(&rat(1, 2)));
        assert_eq!(g2, expect);
        // oracle: m! * gamma_m = plain power
        for m in 1..4u32 {
            let dp = s.divided_power(m).unwrap().scale(&factorial_rat(m));
            assert_eq!(dp, s.pow(m).unwrap());
        }
        // unit component rejected
        let bad = Element::one(&t).add(&s);
        assert!(matches!(bad.divided_power(2), Err(Error::UnitComponent)));
    }

    #[test]
    fn divided_power_pd_indices() {
        // gamma_k(u^[m]) = ((km)!/(k!(m!)^k)) u^[km]
        let t = table(3, 2);
        for m in 1..4u32 {
            for k in 1..4u32 {
                let got = Element::var(&t, Var::U, m).divided_power(k).unwrap();
                let coeff = Rat::from_integer(crate::combin::pd_composition_coeff(k, m));
                assert_eq!(got, Element::var(&t, Var::U, k * m).scale(&coeff));
            }
        }
    }

    #[test]
    fn substitute_is_ring_map() {
        let t = table(3, 2);
        let c2 = gen(&t, "c2");
        let c3 = gen(&t, "c3");
        let s = c2.add(&c3.scale(&rat_i(2)));
        // u^[2] -> gamma_2(s)
        let u2 = Element::var(&t, Var::U, 2);
        assert_eq!(
            u2.substitute(Var::U, &s).unwrap(),
            s.divided_power(2).unwrap()
        );
        // multiplicativity: subst(a*b) = subst(a)*subst(b)
        let a = Element::var(&t, Var::U, 1).mul(&c2).unwrap();
        let b = Element::var(&t, Var::U, 2);
        let ab = a.mul(&b).unwrap();
        let sa = a.substitute(Var::U, &s).unwrap();
        let sb = b.substitute(Var::U, &s).unwrap();
        assert_eq!(
            ab.substitute(Var::U, &s).unwrap(),
            sa.mul(&sb).unwrap()
        );
        // t substitution uses plain powers: t^2 -> 1 under t -> 1
        let p = Element::var(&t, Var::T, 2).mul(&c2).unwrap();
        let one = Element::one(&t);
        assert_eq!(p.substitute(Var::T, &one).unwrap(), c2);
    }

    #[test]
    fn u_cap_truncates_and_counts() {
        let mut gens = vec![Generator {
            name: "psi".into(),
            dim: -1,
            coweight: 0,
            grade: 0,
            kind: GenKind::Psi,
        }];
        gens.push(Generator {
            name: "c2".into(),
            dim: 1,
            coweight: 2,
            grade: 0,
            kind: GenKind::CurveCw(2),
        });
        let t = GenTable::new(
            gens,
            Window {
                g: 2,
                d: 1,
                u_cap: Some(3),
            },
        )
        .unwrap();
        let u2 = Element::var(&t, Var::U, 2);
        let before = t.cap_hits();
        let p = u2.mul(&u2).unwrap();
        assert!(p.is_zero());
        assert_eq!(t.cap_hits(), before + 1);
        // substitution that trips the cap reports an explicit error
        let u1 = Element::var(&t, Var::U, 1);
        let spread = u1.add(&Element::var(&t, Var::U, 3));
        let r = Element::var(&t, Var::U, 2).substitute(Var::U, &spread);
        assert!(matches!(r, Err(Error::CapOverflow { cap: 3 })));
    }

    #[test]
    fn gradings() {
        let t = table(2, 1);
        let e = Element::psi(&t)
            .mul(&gen(&t, "c2"))
            .unwrap()
            .mul(&Element::var(&t, Var::U, 3))
            .unwrap()
            .mul(&Element::var(&t, Var::T, 2))
            .unwrap();
        let m = e.iter().next().unwrap().0.clone();
        assert_eq!(Element::grading_of(&t, &m, Grading::Dimension), -1 + 1 + 3);
        assert_eq!(Element::grading_of(&t, &m, Grading::Coweight), 2 + 3);
        assert_eq!(Element::grading_of(&t, &m, Grading::Grade), 0);
        assert_eq!(Element::grading_of(&t, &m, Grading::TUDegree), 5);
        let split = e.grade_split(Grading::Coweight);
        assert_eq!(split.len(), 1);
        assert!(split.contains_key(&5));
    }

    #[test]
    fn json_round_trip_and_order() {
        let t = table(2, 1);
        let e = gen(&t, "c2")
            .mul(&Element::psi(&t).pow(1).unwrap())
            .unwrap()
            .mul(&Element::var(&t, Var::U, 3))
            .unwrap()
            .scale(&rat(-3, 2))
            .add(&gen(&t, "c3"));
        let v = e.to_json();
        let back = Element::from_json(&t, &v).unwrap();
        assert_eq!(back, e);
        // canonical order is descending: the u-term prints before plain c3
        let s = serde_json::to_string(&v).unwrap();
        let i_c3 = s.find("\"c3\"").unwrap();
        let i_u = s.find("\"u\":3").unwrap();
        assert!(i_u < i_c3);
        // unknown generator rejected
        let bad = serde_json::json!({"terms": [{"coeff": "1", "gens": {"zz": 1}, "t": 0, "u": 0, "x": 0}]});
        assert!(matches!(
            Element::from_json(&t, &bad),
            Err(Error::UnknownGenerator(_))
        ));
    }

    #[test]
    fn display_formats() {
        let t = table(2, 0);
        let e = Element::var(&t, Var::U, 1)
            .sub(&gen(&t, "c2"))
            .sub(&gen(&t, "c3"));
        assert_eq!(e.to_string(), "u - c2 - c3");
        let z = Element::zero(&t);
        assert_eq!(z.to_string(), "0");
        let q = gen(&t, "c2").scale(&rat(-1, 2));
        assert_eq!(q.to_string(), "-1/2*c2");
        let m = Element::var(&t, Var::U, 3)
            .mul(&gen(&t, "c2"))
            .unwrap()
            .mul(&Element::psi(&t))
            .unwrap();
        assert!(m.is_zero()); // field mode kills psi
    }
}
