//! Exact rational kernel: brackets, hyperplane heights, creasings and ridge
//! stresses.
//!
//! A *bracket* `[S]` of `k` points in `Q^(k-1)` is the determinant of the
//! `k x k` matrix whose rows are the points with a trailing `1` appended. It is
//! `(k-1)!` times the signed volume of the simplex spanned by the points. For
//! lifted points in `Q^d`, `[[S]]` denotes the bracket of their projections to
//! `Q^(d-1)`.

use std::fmt;
use std::ops::{Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar. Always stored in lowest terms with a positive
/// denominator, so `==` is structural.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected {expected} points, found {found}")]
    WrongPointCount { expected: usize, found: usize },
    #[error("hyperplane is vertical (projected bracket is zero)")]
    VerticalHyperplane,
    #[error("point sequences do not share their leading ridge points")]
    RidgeMismatch,
    #[error("ridge has no consistent left/right facet pair")]
    InconsistentSides,
}

/// A point with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(Vec<Rat>);

impl Point {
    pub fn new(coords: Vec<Rat>) -> Self {
        Point(coords)
    }

    pub fn from_ints<I: IntoIterator<Item = i64>>(coords: I) -> Self {
        Point(coords.into_iter().map(rat_int).collect())
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![Rat::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rat> {
        self.0
    }

    /// The last coordinate. Panics on a zero-dimensional point.
    pub fn last(&self) -> &Rat {
        self.0.last().expect("point has no coordinates")
    }

    /// Appends `z` as a new last coordinate.
    pub fn lift(&self, z: Rat) -> Point {
        let mut coords = self.0.clone();
        coords.push(z);
        Point(coords)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Determinant by fraction-free (Bareiss) elimination. Every division is exact
/// for integer and rational entries alike.
pub fn determinant<T>(mut m: Vec<Vec<T>>) -> T
where
    T: Clone + Zero + One + Neg<Output = T>,
    for<'a> &'a T: Mul<&'a T, Output = T> + Sub<&'a T, Output = T> + Div<&'a T, Output = T>,
{
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    debug_assert!(m.iter().all(|row| row.len() == n));
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = &t / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

fn bracket_matrix<T: Clone + One>(rows: impl Iterator<Item = Vec<T>>) -> Vec<Vec<T>> {
    rows.map(|mut r| {
        r.push(T::one());
        r
    })
    .collect()
}

/// `[S]` for `k` points of dimension `k - 1`.
pub fn bracket(points: &[Point]) -> Result<Rat, GeometryError> {
    let k = points.len();
    for p in points {
        if p.dim() + 1 != k {
            return Err(GeometryError::DimensionMismatch {
                expected: k.saturating_sub(1),
                found: p.dim(),
            });
        }
    }
    Ok(rational_determinant(bracket_matrix(
        points.iter().map(|p| p.coords().to_vec()),
    )))
}

/// Determinant of a rational matrix: each row is scaled by the lcm of its
/// denominators and the integer determinant is divided by the product of the
/// scales. Much faster than eliminating over the rationals directly.
pub fn rational_determinant(m: Vec<Vec<Rat>>) -> Rat {
    let mut scale = BigInt::one();
    let rows: Vec<Vec<BigInt>> = m
        .into_iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            let ints = row.into_iter().map(|x| x.numer() * (&l / x.denom())).collect();
            scale *= l;
            ints
        })
        .collect();
    Rat::new(determinant(rows), scale)
}

/// Integer variant of [`bracket`], used on final grid coordinates.
pub fn bracket_int(points: &[&[BigInt]]) -> BigInt {
    determinant(bracket_matrix(points.iter().map(|p| p.to_vec())))
}

/// Drops the last coordinate.
pub fn project(p: &Point) -> Point {
    assert!(p.dim() >= 2, "projection needs at least two coordinates");
    Point(p.0[..p.dim() - 1].to_vec())
}

/// `[[S]]`: the bracket of the projected points.
pub fn projected_bracket(points: &[Point]) -> Result<Rat, GeometryError> {
    let projected: Vec<Point> = points.iter().map(project).collect();
    bracket(&projected)
}

fn check_lifted(points: &[Point]) -> Result<usize, GeometryError> {
    let d = points.len();
    if d < 2 {
        return Err(GeometryError::WrongPointCount {
            expected: 2,
            found: d,
        });
    }
    for p in points {
        if p.dim() != d {
            return Err(GeometryError::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
    }
    Ok(d)
}

/// Height above `p` of the hyperplane spanned by the `d` lifted points `s`:
/// `z_S(p) = [S o (p, 0)] / [[S]]`.
pub fn height_on_hyperplane(s: &[Point], p: &Point) -> Result<Rat, GeometryError> {
    let d = check_lifted(s)?;
    if p.dim() + 1 != d {
        return Err(GeometryError::DimensionMismatch {
            expected: d - 1,
            found: p.dim(),
        });
    }
    let denom = projected_bracket(s)?;
    if denom.is_zero() {
        return Err(GeometryError::VerticalHyperplane);
    }
    let mut seq = s.to_vec();
    seq.push(p.lift(Rat::zero()));
    Ok(bracket(&seq)? / denom)
}

fn check_crease_pair(s: &[Point], t: &[Point]) -> Result<usize, GeometryError> {
    let d = check_lifted(s)?;
    if t.len() != d {
        return Err(GeometryError::WrongPointCount {
            expected: d,
            found: t.len(),
        });
    }
    check_lifted(t)?;
    if s[..d - 1] != t[..d - 1] {
        return Err(GeometryError::RidgeMismatch);
    }
    Ok(d)
}

/// Creasing `c(h(S), h(T), X)` where `S = X o s` and `T = X o t`, evaluated by
/// the determinant form `[T o s] / ([[T]] [[S]])`.
pub fn creasing(s: &[Point], t: &[Point]) -> Result<Rat, GeometryError> {
    let d = check_crease_pair(s, t)?;
    let bs = projected_bracket(s)?;
    let bt = projected_bracket(t)?;
    if bs.is_zero() || bt.is_zero() {
        return Err(GeometryError::VerticalHyperplane);
    }
    let mut seq = t.to_vec();
    seq.push(s[d - 1].clone());
    Ok(bracket(&seq)? / (bs * bt))
}

/// Creasing evaluated from hyperplane heights:
/// `(z_T(r) - z_S(r)) / [[S]]` with `r` the projection of the last point of `S`.
pub fn creasing_by_heights(s: &[Point], t: &[Point]) -> Result<Rat, GeometryError> {
    let d = check_crease_pair(s, t)?;
    let bs = projected_bracket(s)?;
    if bs.is_zero() {
        return Err(GeometryError::VerticalHyperplane);
    }
    let r = project(&s[d - 1]);
    let zt = height_on_hyperplane(t, &r)?;
    let zs = height_on_hyperplane(s, &r)?;
    Ok((zt - zs) / bs)
}

/// Which of the two facets handed to [`stress_of_ridge`] is the base facet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseIncidence {
    Neither,
    First,
    Second,
}

/// Stress on the ridge `X` between the facets `X o s_apex` and `X o t_apex`.
///
/// A facet `X o a` is left of `X` when `[[X o a]] > 0` and right when it is
/// negative; the base facet uses the opposite convention. The stress is the
/// creasing from the left facet's hyperplane to the right one's.
pub fn stress_of_ridge(
    ridge: &[Point],
    s_apex: &Point,
    t_apex: &Point,
    base: BaseIncidence,
) -> Result<Rat, GeometryError> {
    let with_apex = |a: &Point| {
        let mut seq = ridge.to_vec();
        seq.push(a.clone());
        seq
    };
    let s = with_apex(s_apex);
    let t = with_apex(t_apex);
    let bs = projected_bracket(&s)?;
    let bt = projected_bracket(&t)?;
    if bs.is_zero() || bt.is_zero() {
        return Err(GeometryError::InconsistentSides);
    }
    let s_left = bs.is_positive() != (base == BaseIncidence::First);
    let t_left = bt.is_positive() != (base == BaseIncidence::Second);
    // Same evaluation as `creasing`, reusing the projected brackets.
    let (left, right_apex, bl, br) = match (s_left, t_left) {
        (true, false) => (&s, t_apex, bs, bt),
        (false, true) => (&t, s_apex, bt, bs),
        _ => return Err(GeometryError::InconsistentSides),
    };
    let mut seq = ridge.to_vec();
    seq.push(right_apex.clone());
    seq.push(left[ridge.len()].clone());
    Ok(bracket(&seq)? / (bl * br))
}

/// Sign of a stress computed on integer grid coordinates: the creasing
/// `[T o s] / ([[T]] [[S]])` with the same left/right convention as
/// [`stress_of_ridge`]. Returns `None` when the sides are inconsistent.
pub fn stress_int(
    ridge: &[&[BigInt]],
    s_apex: &[BigInt],
    t_apex: &[BigInt],
    base: BaseIncidence,
) -> Option<Rat> {
    let proj = |seq: &[&[BigInt]]| -> BigInt {
        let rows: Vec<&[BigInt]> = seq.iter().map(|p| &p[..p.len() - 1]).collect();
        bracket_int(&rows)
    };
    let mut s: Vec<&[BigInt]> = ridge.to_vec();
    s.push(s_apex);
    let mut t: Vec<&[BigInt]> = ridge.to_vec();
    t.push(t_apex);
    let bs = proj(&s);
    let bt = proj(&t);
    if bs.is_zero() || bt.is_zero() {
        return None;
    }
    let s_left = bs.is_positive() != (base == BaseIncidence::First);
    let t_left = bt.is_positive() != (base == BaseIncidence::Second);
    let (l, r, bl, br) = match (s_left, t_left) {
        (true, false) => (&s, &t, bs, bt),
        (false, true) => (&t, &s, bt, bs),
        _ => return None,
    };
    let mut seq = r.clone();
    seq.push(l[l.len() - 1]);
    Some(Rat::new(bracket_int(&seq), bl * br))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(raw: &[&[i64]]) -> Vec<Point> {
        raw.iter().map(|c| Point::from_ints(c.iter().copied())).collect()
    }

    fn fixture() -> Vec<Point> {
        vec![
            Point::from_ints([0, 0, 0]),
            Point::from_ints([2, 0, 0]),
            Point::from_ints([0, 2, 0]),
            Point::new(vec![rat(2, 3), rat(2, 3), rat(16, 9)]),
        ]
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(bracket(&pts(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap(), rat_int(1));
        assert_eq!(bracket(&pts(&[&[0, 0], &[2, 0], &[0, 2]])).unwrap(), rat_int(4));
        assert_eq!(bracket(&pts(&[&[0, 0], &[0, 2], &[2, 0]])).unwrap(), rat_int(-4));
    }

    #[test]
    fn bracket_rejects_wrong_dimension() {
        let err = bracket(&pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]])).unwrap_err();
        assert!(matches!(err, GeometryError::DimensionMismatch { .. }));
    }

    #[test]
    fn determinant_pivots_on_zero_diagonal() {
        let m = vec![
            vec![rat_int(0), rat_int(1), rat_int(2)],
            vec![rat_int(1), rat_int(0), rat_int(3)],
            vec![rat_int(4), rat_int(-3), rat_int(8)],
        ];
        // Cofactor expansion by hand: 0*(0+9) - 1*(8-12) + 2*(-3-0) = -2.
        assert_eq!(determinant(m), rat_int(-2));
        let singular = vec![vec![BigInt::from(1), BigInt::from(2)], vec![BigInt::from(2), BigInt::from(4)]];
        assert!(determinant(singular).is_zero());
    }

    #[test]
    fn project_drops_last() {
        assert_eq!(project(&Point::from_ints([1, 2, 3])), Point::from_ints([1, 2]));
        assert_eq!(project(&Point::from_ints([0, 0, 0, 5])), Point::from_ints([0, 0, 0]));
        let p = Point::new(vec![rat(1, 3), rat(-2, 7)]);
        assert_eq!(project(&p.lift(rat(9, 4))), p);
    }

    #[test]
    fn height_examples() {
        let basis = pts(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(height_on_hyperplane(&basis, &Point::from_ints([0, 0])).unwrap(), rat_int(1));

        let flat = pts(&[&[0, 0, 0], &[2, 0, 0], &[0, 2, 0]]);
        assert!(height_on_hyperplane(&flat, &Point::new(vec![rat(5, 3), rat(-1, 2)]))
            .unwrap()
            .is_zero());

        let raised = pts(&[&[0, 0, 7], &[2, 0, 7], &[0, 2, 7]]);
        assert_eq!(height_on_hyperplane(&raised, &Point::from_ints([1, 1])).unwrap(), rat_int(7));
    }

    #[test]
    fn height_rejects_vertical_plane() {
        let vertical = pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 1]]);
        assert_eq!(
            height_on_hyperplane(&vertical, &Point::from_ints([0, 1])),
            Err(GeometryError::VerticalHyperplane)
        );
    }

    #[test]
    fn coplanar_creasing_is_zero() {
        let s = pts(&[&[0, 0, 1], &[1, 0, 2], &[0, 1, 3]]);
        // (1,1) on the plane z = 1 + x + 2y.
        let t = pts(&[&[0, 0, 1], &[1, 0, 2], &[1, 1, 4]]);
        assert!(creasing(&s, &t).unwrap().is_zero());
        assert!(creasing_by_heights(&s, &t).unwrap().is_zero());
    }

    #[test]
    fn creasing_prefix_must_match() {
        let s = pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]);
        let t = pts(&[&[0, 0, 0], &[2, 0, 0], &[0, 1, 0]]);
        assert_eq!(creasing(&s, &t), Err(GeometryError::RidgeMismatch));
    }

    #[test]
    fn fixture_stresses() {
        let v = fixture();
        // Interior ridge (v0, p) between facets {v0, p, v1} and {v0, p, v2}.
        let x = [v[0].clone(), v[3].clone()];
        let w = stress_of_ridge(&x, &v[1], &v[2], BaseIncidence::Neither).unwrap();
        assert_eq!(w, rat_int(4));
        // Base ridge (v0, v1) between {v0, v1, p} and the base facet.
        let x = [v[0].clone(), v[1].clone()];
        let w = stress_of_ridge(&x, &v[3], &v[2], BaseIncidence::Second).unwrap();
        assert_eq!(w, rat(-4, 3));
        let w = stress_of_ridge(&x, &v[2], &v[3], BaseIncidence::First).unwrap();
        assert_eq!(w, rat(-4, 3));
    }

    #[test]
    fn fixture_creasing_both_forms() {
        let v = fixture();
        // S = X o p with X = (v0, v1); T = X o v2 is the base plane.
        let s = vec![v[0].clone(), v[1].clone(), v[3].clone()];
        let t = vec![v[0].clone(), v[1].clone(), v[2].clone()];
        let eq3 = creasing(&s, &t).unwrap();
        assert_eq!(eq3, creasing_by_heights(&s, &t).unwrap());
        assert_eq!(eq3, rat(-4, 3));
        assert_eq!(creasing(&t, &s).unwrap(), rat(4, 3));
    }

    #[test]
    fn stress_int_matches_rational() {
        let v: Vec<Vec<BigInt>> = [[0, 0, 0], [6, 0, 0], [0, 6, 0], [2, 2, 16]]
            .iter()
            .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let pv: Vec<Point> = [[0, 0, 0], [6, 0, 0], [0, 6, 0], [2, 2, 16]]
            .iter()
            .map(|c| Point::from_ints(c.iter().copied()))
            .collect();
        let x = [v[0].as_slice(), v[3].as_slice()];
        let got = stress_int(&x, &v[1], &v[2], BaseIncidence::Neither).unwrap();
        let want = stress_of_ridge(&[pv[0].clone(), pv[3].clone()], &pv[1], &pv[2], BaseIncidence::Neither)
            .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn both_left_is_inconsistent() {
        let v = fixture();
        let x = [v[0].clone(), v[1].clone()];
        assert_eq!(
            stress_of_ridge(&x, &v[2], &v[3], BaseIncidence::Neither),
            Err(GeometryError::InconsistentSides)
        );
    }
}
