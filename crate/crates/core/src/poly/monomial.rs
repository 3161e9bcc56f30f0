use std::cmp::Ordering;
use std::fmt;

/// Kinds of variables. Declaration order is the global variable order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    X,
    Y,
    Alpha,
    Beta,
    T,
    Eps,
}

impl Kind {
    pub const ALL: [Kind; 6] = [Kind::X, Kind::Y, Kind::Alpha, Kind::Beta, Kind::T, Kind::Eps];

    pub fn is_indexed(self) -> bool {
        !matches!(self, Kind::T | Kind::Eps)
    }

    fn base(self) -> usize {
        match self {
            Kind::X => 0,
            Kind::Y => 6,
            Kind::Alpha => 12,
            Kind::Beta => 18,
            Kind::T => 24,
            Kind::Eps => 25,
        }
    }

    /// The operator kind dual to a target kind under contraction, and back.
    pub fn dual(self) -> Kind {
        match self {
            Kind::X => Kind::Alpha,
            Kind::Y => Kind::Beta,
            Kind::Alpha => Kind::X,
            Kind::Beta => Kind::Y,
            k => k,
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            Kind::X => "x",
            Kind::Y => "y",
            Kind::Alpha => "a",
            Kind::Beta => "b",
            Kind::T => "t",
            Kind::Eps => "eps",
        }
    }
}

pub const NVARS: usize = 26;

/// A variable: a kind and, for indexed kinds, an index in 1..=6.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    kind: Kind,
    index: u8,
}

impl Variable {
    /// Panics on an index outside 1..=6 for indexed kinds.
    pub fn new(kind: Kind, index: usize) -> Self {
        if kind.is_indexed() {
            assert!((1..=6).contains(&index), "variable index {index} out of range");
            Variable {
                kind,
                index: index as u8,
            }
        } else {
            Variable { kind, index: 0 }
        }
    }

    pub fn x(i: usize) -> Self {
        Variable::new(Kind::X, i)
    }
    pub fn y(i: usize) -> Self {
        Variable::new(Kind::Y, i)
    }
    pub fn alpha(i: usize) -> Self {
        Variable::new(Kind::Alpha, i)
    }
    pub fn beta(i: usize) -> Self {
        Variable::new(Kind::Beta, i)
    }
    pub fn t() -> Self {
        Variable::new(Kind::T, 0)
    }
    pub fn eps() -> Self {
        Variable::new(Kind::Eps, 0)
    }

    pub fn kind(self) -> Kind {
        self.kind
    }

    /// 1-based index; 0 for `t` and `eps`.
    pub fn index(self) -> usize {
        self.index as usize
    }

    /// Position in the global order, 0..NVARS.
    pub fn position(self) -> usize {
        if self.kind.is_indexed() {
            self.kind.base() + self.index as usize - 1
        } else {
            self.kind.base()
        }
    }

    pub fn from_position(p: usize) -> Self {
        assert!(p < NVARS);
        match p {
            24 => Variable::t(),
            25 => Variable::eps(),
            _ => {
                let kind = [Kind::X, Kind::Y, Kind::Alpha, Kind::Beta][p / 6];
                Variable::new(kind, p % 6 + 1)
            }
        }
    }

    pub fn dual(self) -> Variable {
        Variable {
            kind: self.kind.dual(),
            index: self.index,
        }
    }

    /// All variables of the given kinds, in global order.
    pub fn of_kinds(kinds: &[Kind]) -> Vec<Variable> {
        let mut out: Vec<Variable> = (0..NVARS)
            .map(Variable::from_position)
            .filter(|v| kinds.contains(&v.kind))
            .collect();
        out.sort();
        out
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind.is_indexed() {
            write!(f, "{}{}", self.kind.prefix(), self.index)
        } else {
            f.write_str(self.kind.prefix())
        }
    }
}

/// Per-variable weights used to grade polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Weights([u32; NVARS]);

impl Weights {
    pub fn zero() -> Self {
        Weights([0; NVARS])
    }

    /// Weight one on every variable of the given kinds, zero elsewhere.
    pub fn kinds(kinds: &[Kind]) -> Self {
        let mut w = Weights::zero();
        for v in Variable::of_kinds(kinds) {
            w.0[v.position()] = 1;
        }
        w
    }

    pub fn with(mut self, kind: Kind, weight: u32) -> Self {
        for v in Variable::of_kinds(&[kind]) {
            self.0[v.position()] = weight;
        }
        self
    }

    pub fn of(&self, v: Variable) -> u32 {
        self.0[v.position()]
    }
}

/// A monomial as a dense exponent vector over the global variable order.
///
/// Ordering: total degree first, then lexicographic with earlier variables
/// more significant and larger exponents first, so that `x1^d` is the
/// smallest monomial of degree `d`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u16; NVARS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial { exps: [0; NVARS] };

    pub fn var(v: Variable) -> Self {
        Monomial::var_pow(v, 1)
    }

    pub fn var_pow(v: Variable, e: u32) -> Self {
        let mut m = Monomial::ONE;
        m.exps[v.position()] = e as u16;
        m
    }

    pub fn from_pairs(pairs: &[(Variable, u32)]) -> Self {
        let mut m = Monomial::ONE;
        for &(v, e) in pairs {
            m.exps[v.position()] += e as u16;
        }
        m
    }

    pub fn exp(&self, v: Variable) -> u32 {
        self.exps[v.position()] as u32
    }

    pub(crate) fn exp_at(&self, p: usize) -> u32 {
        self.exps[p] as u32
    }

    pub(crate) fn set_exp_at(&mut self, p: usize, e: u32) {
        self.exps[p] = e as u16;
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn degree_in(&self, kind: Kind) -> u32 {
        Variable::of_kinds(&[kind]).iter().map(|&v| self.exp(v)).sum()
    }

    pub fn weighted_degree(&self, w: &Weights) -> u32 {
        self.exps.iter().zip(w.0.iter()).map(|(&e, &wt)| e as u32 * wt).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Variables with nonzero exponent, in global order.
    pub fn support(&self) -> impl Iterator<Item = (Variable, u32)> + '_ {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(p, &e)| (Variable::from_position(p), e as u32))
    }

    pub fn involves_kind(&self, kind: Kind) -> bool {
        self.support().any(|(v, _)| v.kind() == kind)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for p in 0..NVARS {
            m.exps[p] += other.exps[p];
        }
        m
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        (0..NVARS).all(|p| self.exps[p] <= other.exps[p])
    }

    /// Maps every variable through `f` (which must preserve positions
    /// injectively); exponents of colliding images are added.
    pub fn rename(&self, f: impl Fn(Variable) -> Variable) -> Monomial {
        let mut m = Monomial::ONE;
        for (v, e) in self.support() {
            m.exps[f(v).position()] += e as u16;
        }
        m
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .support()
            .map(|(v, e)| if e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// All monomials of degree `d` in `vars`, in the crate's monomial order.
pub fn monomials_of_degree(vars: &[Variable], d: u32) -> Vec<Monomial> {
    let mut sorted = vars.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out = Vec::new();
    let mut cur = Monomial::ONE;
    fill(&sorted, d, &mut cur, &mut out);
    out
}

// Largest exponent on the earliest variable first gives the required order.
fn fill(vars: &[Variable], d: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
    match vars.split_first() {
        None => {
            if d == 0 {
                out.push(*cur);
            }
        }
        Some((&v, rest)) => {
            if rest.is_empty() {
                cur.exps[v.position()] = d as u16;
                out.push(*cur);
                cur.exps[v.position()] = 0;
                return;
            }
            for e in (0..=d).rev() {
                cur.exps[v.position()] = e as u16;
                fill(rest, d - e, cur, out);
            }
            cur.exps[v.position()] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_order() {
        let all: Vec<Variable> = (0..NVARS).map(Variable::from_position).collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert!(Variable::x(6) < Variable::y(1));
        assert!(Variable::beta(6) < Variable::t());
        assert!(Variable::t() < Variable::eps());
        for (p, v) in all.iter().enumerate() {
            assert_eq!(v.position(), p);
        }
    }

    #[test]
    fn monomial_counts() {
        let x = Variable::of_kinds(&[Kind::X]);
        let a = Variable::of_kinds(&[Kind::Alpha]);
        assert_eq!(monomials_of_degree(&x, 2).len(), 21);
        assert_eq!(monomials_of_degree(&a, 3).len(), 56);
        assert_eq!(monomials_of_degree(&a, 0), vec![Monomial::ONE]);
        let xy = Variable::of_kinds(&[Kind::X, Kind::Y]);
        assert_eq!(monomials_of_degree(&xy, 3).len(), 364);
    }

    #[test]
    fn order_is_graded_lex() {
        let x = Variable::of_kinds(&[Kind::X]);
        let ms = monomials_of_degree(&x, 2);
        assert_eq!(ms[0], Monomial::var_pow(Variable::x(1), 2));
        assert_eq!(ms[1], Monomial::from_pairs(&[(Variable::x(1), 1), (Variable::x(2), 1)]));
        assert_eq!(ms[20], Monomial::var_pow(Variable::x(6), 2));
        let mut sorted = ms.clone();
        sorted.sort();
        assert_eq!(ms, sorted);
        assert!(Monomial::var(Variable::x(6)) < Monomial::var_pow(Variable::x(1), 2));
    }
}
