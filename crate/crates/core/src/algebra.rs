//! Commutative semirings that every inference routine is generic over.
//!
//! An element type implements [`Semiring`]; element types that also support
//! subtraction (`(a ⊖ b) ⊕ b = a`) implement [`Ring`]. The concrete
//! instances are generic over their scalar so that `f32`, `f64` and the
//! integer types can all be plugged in:
//!
//! | type            | ⊕    | ⊗   | 𝟘    | 𝟙    | ⊖   |
//! |-----------------|------|-----|------|------|-----|
//! | [`SumProduct`]  | `+`  | `×` | 0    | 1    | `−` |
//! | [`MinPlus`]     | min  | `+` | +∞   | 0    |     |
//! | [`Count`]       | `+`  | `×` | 0    | 1    | `−` |
//! | [`BoolOrAnd`]   | or   | and | false| true |     |

use std::fmt::{self, Debug, Display};

use num_traits::{Float, FromPrimitive, Num};

/// A commutative semiring `(R, ⊕, ⊗, 𝟘, 𝟙)`.
///
/// Implementations must satisfy the usual axioms: both operations are
/// commutative and associative, `zero` and `one` are their identities,
/// `⊗` distributes over `⊕`, and `zero` absorbs under `⊗`.
pub trait Semiring: Clone + Debug + PartialEq + Send + Sync + 'static {
    /// Short name used in reports and error messages.
    const NAME: &'static str;

    /// Whether `⊕` is `min` over a totally ordered carrier, so that interval
    /// folds may use overlapping range-minimum queries.
    const RANGE_MIN: bool = false;

    fn zero() -> Self;
    fn one() -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    /// Map a stored energy `ψ` to the cost `c` used by this semiring.
    fn from_energy(energy: f64) -> Self;

    /// Folds `⊕` over an iterator; the empty fold is `𝟘`.
    fn sum<'a, I>(items: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
    {
        items.into_iter().fold(Self::zero(), |acc, x| acc.plus(x))
    }

    /// Folds `⊗` over an iterator; the empty fold is `𝟙`.
    fn product<'a, I>(items: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
    {
        items.into_iter().fold(Self::one(), |acc, x| acc.times(x))
    }

    /// Power-of-two exponent `k` such that dividing every value of a layer by
    /// `2^k` brings the layer back into a safe floating-point range, or `0`
    /// when no rescaling is needed. Only floating sum-product overrides this.
    fn rescale_exponent(_layer: &[Self]) -> i32 {
        0
    }

    /// Multiplies the element by `2^-k`.
    fn unscale(&self, _k: i32) -> Self {
        self.clone()
    }

    /// Splits the element into `m · 2^k` with `m` of unit magnitude; exact
    /// carriers return `(self, 0)`.
    fn split_exponent(&self) -> (Self, i32) {
        (self.clone(), 0)
    }
}

/// A semiring with a subtraction satisfying `(a ⊖ b) ⊕ b = a`.
pub trait Ring: Semiring {
    fn minus(&self, other: &Self) -> Self;
}

/// A ring in which nonzero costs can be divided out exactly.
pub trait Field: Ring {
    /// `self / other`, or `None` when `other` is not invertible.
    fn divide(&self, other: &Self) -> Option<Self>;
}

/// Upper bound on layer magnitudes before a rescale is triggered.
pub const RESCALE_HIGH: f64 = 1e200;
/// Lower bound on layer magnitudes before a rescale is triggered.
pub const RESCALE_LOW: f64 = 1e-200;

/// Real numbers under `(+, ×)`; partition functions and marginals.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct SumProduct<T>(pub T);

/// Extended reals under `(min, +)`; energy minimization.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct MinPlus<T>(pub T);

/// Integers under `(+, ×)`; exact labeling counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Count<T>(pub T);

/// Booleans under `(or, and)`; reachability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct BoolOrAnd(pub bool);

impl<T> Semiring for SumProduct<T>
where
    T: Float + Debug + Send + Sync + 'static,
{
    const NAME: &'static str = "sum-product";

    fn zero() -> Self {
        SumProduct(T::zero())
    }
    fn one() -> Self {
        SumProduct(T::one())
    }
    fn plus(&self, other: &Self) -> Self {
        SumProduct(self.0 + other.0)
    }
    fn times(&self, other: &Self) -> Self {
        SumProduct(self.0 * other.0)
    }
    fn from_energy(energy: f64) -> Self {
        SumProduct(T::from((-energy).exp()).unwrap_or_else(T::infinity))
    }

    fn rescale_exponent(layer: &[Self]) -> i32 {
        let max = layer
            .iter()
            .map(|x| x.0.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a });
        let max = max.to_f64().unwrap_or(0.0);
        if !max.is_finite() || max == 0.0 {
            return 0;
        }
        if max > RESCALE_HIGH || max < RESCALE_LOW {
            max.log2().floor() as i32
        } else {
            0
        }
    }

    fn unscale(&self, k: i32) -> Self {
        SumProduct(ldexp(self.0, -k))
    }

    fn split_exponent(&self) -> (Self, i32) {
        let x = self.0;
        if x == T::zero() || !x.is_finite() {
            return (*self, 0);
        }
        let k = x.abs().log2().floor().to_i32().unwrap_or(0);
        (SumProduct(ldexp(x, -k)), k)
    }
}

impl<T> Ring for SumProduct<T>
where
    T: Float + Debug + Send + Sync + 'static,
{
    fn minus(&self, other: &Self) -> Self {
        SumProduct(self.0 - other.0)
    }
}

impl<T> Semiring for MinPlus<T>
where
    T: Float + Debug + Send + Sync + 'static,
{
    const NAME: &'static str = "min-plus";
    const RANGE_MIN: bool = true;

    fn zero() -> Self {
        MinPlus(T::infinity())
    }
    fn one() -> Self {
        MinPlus(T::zero())
    }
    fn plus(&self, other: &Self) -> Self {
        if other.0 < self.0 {
            *other
        } else {
            *self
        }
    }
    fn times(&self, other: &Self) -> Self {
        // 𝟘 stays absorbing even against -∞
        if self.0 == T::infinity() || other.0 == T::infinity() {
            Self::zero()
        } else {
            MinPlus(self.0 + other.0)
        }
    }
    fn from_energy(energy: f64) -> Self {
        MinPlus(T::from(energy).unwrap_or_else(T::infinity))
    }
}

impl<T> Semiring for Count<T>
where
    T: Num + FromPrimitive + Clone + Debug + PartialEq + Send + Sync + 'static,
{
    const NAME: &'static str = "count";

    fn zero() -> Self {
        Count(T::zero())
    }
    fn one() -> Self {
        Count(T::one())
    }
    fn plus(&self, other: &Self) -> Self {
        Count(self.0.clone() + other.0.clone())
    }
    fn times(&self, other: &Self) -> Self {
        Count(self.0.clone() * other.0.clone())
    }
    fn from_energy(energy: f64) -> Self {
        Count(T::from_f64(energy.round()).unwrap_or_else(T::zero))
    }
}

impl<T> Ring for Count<T>
where
    T: Num + FromPrimitive + Clone + Debug + PartialEq + Send + Sync + 'static,
{
    fn minus(&self, other: &Self) -> Self {
        Count(self.0.clone() - other.0.clone())
    }
}

impl<T> Field for SumProduct<T>
where
    T: Float + Debug + Send + Sync + 'static,
{
    fn divide(&self, other: &Self) -> Option<Self> {
        (other.0 != T::zero() && other.0.is_finite()).then(|| SumProduct(self.0 / other.0))
    }
}

impl<T> Field for Count<T>
where
    T: Num + FromPrimitive + Clone + Debug + PartialEq + Send + Sync + 'static,
{
    /// Exact division only; a remainder means the quotient is not an element.
    fn divide(&self, other: &Self) -> Option<Self> {
        if other.0 == T::zero() || self.0.clone() % other.0.clone() != T::zero() {
            return None;
        }
        Some(Count(self.0.clone() / other.0.clone()))
    }
}

impl Semiring for BoolOrAnd {
    const NAME: &'static str = "bool";

    fn zero() -> Self {
        BoolOrAnd(false)
    }
    fn one() -> Self {
        BoolOrAnd(true)
    }
    fn plus(&self, other: &Self) -> Self {
        BoolOrAnd(self.0 || other.0)
    }
    fn times(&self, other: &Self) -> Self {
        BoolOrAnd(self.0 && other.0)
    }
    fn from_energy(energy: f64) -> Self {
        BoolOrAnd(energy != 0.0)
    }
}

/// `x · 2^k`, applied in bounded steps so intermediate powers stay finite.
pub fn ldexp<T: Float>(mut x: T, mut k: i32) -> T {
    let two = T::one() + T::one();
    while k != 0 {
        let step = k.clamp(-1000, 1000);
        x = x * two.powi(step);
        k -= step;
    }
    x
}

/// A semiring value together with a power-of-two scale: the represented
/// quantity is `value · 2^exp2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Scaled<S> {
    pub value: S,
    pub exp2: i64,
}

impl<S> Scaled<S> {
    pub fn exact(value: S) -> Self {
        Scaled { value, exp2: 0 }
    }
}

fn clamp_shift(d: i64) -> i32 {
    d.clamp(-4000, 4000) as i32
}

impl<S: Semiring> Scaled<S> {
    pub fn new(value: S, exp2: i64) -> Self {
        Scaled { value, exp2 }.normalized()
    }

    /// Moves the magnitude of `value` into `exp2`.
    pub fn normalized(self) -> Self {
        let (m, k) = self.value.split_exponent();
        if m.is_zero() {
            return Scaled { value: m, exp2: 0 };
        }
        Scaled { value: m, exp2: self.exp2 + k as i64 }
    }

    /// The value expressed at scale `2^exp2`.
    fn at(&self, exp2: i64) -> S {
        if self.value.is_zero() {
            return self.value.clone();
        }
        self.value.unscale(clamp_shift(exp2 - self.exp2))
    }

    fn common(&self, other: &Self) -> i64 {
        match (self.value.is_zero(), other.value.is_zero()) {
            (true, _) => other.exp2,
            (_, true) => self.exp2,
            _ => self.exp2.max(other.exp2),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let e = self.common(other);
        Scaled::new(self.at(e).plus(&other.at(e)), e)
    }

    pub fn times(&self, other: &Self) -> Self {
        Scaled::new(self.value.times(&other.value), self.exp2 + other.exp2)
    }
}

impl<S: Ring> Scaled<S> {
    pub fn minus(&self, other: &Self) -> Self {
        let e = self.common(other);
        Scaled::new(self.at(e).minus(&other.at(e)), e)
    }
}

impl<S: Field> Scaled<S> {
    pub fn divide(&self, other: &Self) -> Option<Self> {
        Some(Scaled::new(self.value.divide(&other.value)?, self.exp2 - other.exp2))
    }
}

impl<T: Float> Scaled<SumProduct<T>> {
    /// Natural log of the represented quantity.
    pub fn ln(&self) -> T {
        let ln2 = T::from(std::f64::consts::LN_2).unwrap();
        self.value.0.ln() + T::from(self.exp2).unwrap() * ln2
    }

    /// Natural log of the scale factor alone.
    pub fn log_scale(&self) -> T {
        T::from(self.exp2).unwrap() * T::from(std::f64::consts::LN_2).unwrap()
    }

    /// The plain value; `±inf` or `0` when not representable.
    pub fn to_float(&self) -> T {
        let k = self.exp2.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        ldexp(self.value.0, k)
    }
}

/// Which algebra a model or command runs under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SemiringKind {
    SumProduct,
    MinPlus,
    Count,
    Bool,
}

impl SemiringKind {
    pub const ALL: [SemiringKind; 4] = [
        SemiringKind::SumProduct,
        SemiringKind::MinPlus,
        SemiringKind::Count,
        SemiringKind::Bool,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SemiringKind::SumProduct => "sum-product",
            SemiringKind::MinPlus => "min-plus",
            SemiringKind::Count => "count",
            SemiringKind::Bool => "bool",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Whether the algebra has a `⊖`.
    pub fn is_ring(self) -> bool {
        matches!(self, SemiringKind::SumProduct | SemiringKind::Count)
    }
}

impl Display for SemiringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One algebraic law checked by [`verify_semiring_laws`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    PlusCommutative,
    PlusAssociative,
    TimesCommutative,
    TimesAssociative,
    PlusIdentity,
    TimesIdentity,
    Distributive,
    ZeroAbsorbs,
    MinusInverse,
}

/// Outcome of one axiom: the first violating triple, if any.
#[derive(Clone, Debug)]
pub struct LawCheck<S> {
    pub axiom: Axiom,
    pub counterexample: Option<(S, S, S)>,
}

impl<S> LawCheck<S> {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct LawReport<S> {
    pub checks: Vec<LawCheck<S>>,
}

impl<S> LawReport<S> {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(LawCheck::passed)
    }

    pub fn get(&self, axiom: Axiom) -> Option<&LawCheck<S>> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

fn first_violation<S: Clone>(
    elements: &[S],
    holds: impl Fn(&S, &S, &S) -> bool,
) -> Option<(S, S, S)> {
    for a in elements {
        for b in elements {
            for c in elements {
                if !holds(a, b, c) {
                    return Some((a.clone(), b.clone(), c.clone()));
                }
            }
        }
    }
    None
}

/// Checks the semiring axioms over every triple drawn from `elements`.
///
/// Equality is exact, so callers should pick elements on which the carrier's
/// arithmetic is exact (small integers for floating types).
pub fn verify_semiring_laws<S: Semiring>(elements: &[S]) -> LawReport<S> {
    let z = S::zero();
    let o = S::one();
    let mut checks = vec![
        (Axiom::PlusCommutative, first_violation(elements, |a, b, _| a.plus(b) == b.plus(a))),
        (
            Axiom::PlusAssociative,
            first_violation(elements, |a, b, c| a.plus(b).plus(c) == a.plus(&b.plus(c))),
        ),
        (Axiom::TimesCommutative, first_violation(elements, |a, b, _| a.times(b) == b.times(a))),
        (
            Axiom::TimesAssociative,
            first_violation(elements, |a, b, c| a.times(b).times(c) == a.times(&b.times(c))),
        ),
        (Axiom::PlusIdentity, first_violation(elements, |a, _, _| a.plus(&z) == *a)),
        (Axiom::TimesIdentity, first_violation(elements, |a, _, _| a.times(&o) == *a)),
        (
            Axiom::Distributive,
            first_violation(elements, |a, b, c| {
                a.times(&b.plus(c)) == a.times(b).plus(&a.times(c))
            }),
        ),
        (Axiom::ZeroAbsorbs, first_violation(elements, |a, _, _| a.times(&z) == z)),
    ];
    LawReport {
        checks: checks
            .drain(..)
            .map(|(axiom, counterexample)| LawCheck { axiom, counterexample })
            .collect(),
    }
}

/// [`verify_semiring_laws`] plus the ring condition `(a ⊖ b) ⊕ b = a`.
pub fn verify_ring_laws<S: Ring>(elements: &[S]) -> LawReport<S> {
    let mut report = verify_semiring_laws(elements);
    report.checks.push(LawCheck {
        axiom: Axiom::MinusInverse,
        counterexample: first_violation(elements, |a, b, _| a.minus(b).plus(b) == *a),
    });
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(v: &[f64]) -> Vec<SumProduct<f64>> {
        v.iter().copied().map(SumProduct).collect()
    }

    #[test]
    fn sum_product_is_a_ring() {
        let report = verify_ring_laws(&sp(&[0.0, 1.0, 2.0, 3.0, 5.0]));
        assert!(report.all_passed(), "{report:?}");
        let a = SumProduct(5.0);
        let b = SumProduct(3.0);
        assert_eq!(a.minus(&b).plus(&b), a);
    }

    #[test]
    fn min_plus_is_a_semiring() {
        let els: Vec<_> = [0.0, 1.0, 2.0, f64::INFINITY].into_iter().map(MinPlus).collect();
        assert!(verify_semiring_laws(&els).all_passed());
        assert_eq!(MinPlus(2.0).plus(&MinPlus(3.0)), MinPlus(2.0));
        assert_eq!(MinPlus(2.0).times(&MinPlus::zero()), MinPlus(f64::INFINITY));
    }

    #[test]
    fn bool_or_and_is_a_semiring() {
        let els = [BoolOrAnd(false), BoolOrAnd(true)];
        let report = verify_semiring_laws(&els);
        assert!(report.get(Axiom::Distributive).unwrap().passed());
        assert!(report.all_passed());
    }

    #[test]
    fn count_is_a_ring() {
        let els: Vec<_> = [-2i64, 0, 1, 3, 7].into_iter().map(Count).collect();
        assert!(verify_ring_laws(&els).all_passed());
    }

    #[test]
    fn broken_semiring_reports_counterexample() {
        // max-times over signed values does not distribute
        #[derive(Clone, Debug, PartialEq)]
        struct Bad(i32);
        impl Semiring for Bad {
            const NAME: &'static str = "bad";
            fn zero() -> Self {
                Bad(0)
            }
            fn one() -> Self {
                Bad(1)
            }
            fn plus(&self, o: &Self) -> Self {
                Bad(self.0.max(o.0))
            }
            fn times(&self, o: &Self) -> Self {
                Bad(self.0 * o.0)
            }
            fn from_energy(_: f64) -> Self {
                Bad(1)
            }
        }
        let report = verify_semiring_laws(&[Bad(-1), Bad(2), Bad(3)]);
        let dist = report.get(Axiom::Distributive).unwrap();
        assert!(dist.counterexample.is_some());
        assert!(!report.all_passed());
    }

    #[test]
    fn empty_folds() {
        assert_eq!(SumProduct::<f64>::sum([].iter()), SumProduct(0.0));
        assert_eq!(SumProduct::<f64>::product([].iter()), SumProduct(1.0));
        assert_eq!(MinPlus::<f64>::sum([].iter()), MinPlus(f64::INFINITY));
    }

    #[test]
    fn energy_mapping() {
        assert!((SumProduct::<f64>::from_energy(1.0).0 - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(MinPlus::<f64>::from_energy(-0.5), MinPlus(-0.5));
        assert_eq!(Count::<i64>::from_energy(3.0), Count(3));
        assert_eq!(BoolOrAnd::from_energy(0.0), BoolOrAnd(false));
    }

    #[test]
    fn rescale_triggers_only_out_of_range() {
        assert_eq!(SumProduct::rescale_exponent(&sp(&[1.0, 1e100])), 0);
        let k = SumProduct::rescale_exponent(&sp(&[1e250, 3.0]));
        assert!(k > 800);
        let back = SumProduct(1e250f64).unscale(k);
        assert!(back.0 >= 1.0 && back.0 < 2.0);
        let k = SumProduct::rescale_exponent(&sp(&[1e-250]));
        assert!(k < -800);
    }

    #[test]
    fn scaled_roundtrip() {
        let s = Scaled { value: SumProduct(1.5f64), exp2: 3 };
        assert_eq!(s.to_float(), 12.0);
        assert!((s.ln() - 12.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn scaled_arithmetic_spans_exponents() {
        let big = Scaled::new(SumProduct(1.0f64), 5000);
        let small = Scaled::new(SumProduct(3.0f64), 4998);
        let sum = big.plus(&small);
        assert!((sum.ln() - (1.75f64.ln() + 5000.0 * std::f64::consts::LN_2)).abs() < 1e-12);
        let q = sum.divide(&big).unwrap();
        assert!((q.to_float() - 1.75).abs() < 1e-15);
        assert!((sum.minus(&small).divide(&big).unwrap().to_float() - 1.0).abs() < 1e-15);
        assert_eq!(Scaled::new(SumProduct(0.0f64), 7).plus(&small).to_float(), small.to_float());
        let c = Scaled::exact(Count(6i64)).divide(&Scaled::exact(Count(4))).is_none();
        assert!(c);
    }
}
