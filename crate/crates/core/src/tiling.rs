//! Five independent tests of the equivalent tiling/spectral conditions for a
//! set `Omega` and a subgroup `H` of a finite abelian group:
//!
//! 1. `Omega` tiles `G` by translations in `H`.
//! 2. `|Omega| = |Q_H|` and the translates `|Omega|^{-1/2} 1_Omega(. - h)`
//!    are orthonormal.
//! 3. `|Omega| = |Q_H|` and `sum_{chi' in H^perp} |F(1_Omega)(chi + chi')|^2 = |Omega|^2`
//!    for every `chi`.
//! 4. `||f 1_Omega||^2 = |Omega|^{-1} sum_{chi in H^perp} |F(f 1_Omega)(chi)|^2`
//!    for all `f`.
//! 5. The characters in `H^perp` form an orthogonal basis of `L^2(Omega)`.
//!
//! Each checker works from its own formula and shares nothing with the
//! others, so agreement between them is a meaningful test. The bracket map
//! of the translation representation lives here as well.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::cyclotomic::{CyclotomicInt, CyclotomicRing};
use crate::error::{invalid, Result};
use crate::fourier::{character_sum, convolve, dft, involution, to_f64, FunctionOnGroup};
use crate::group::{root_of_unity, Character, Element, MeasureConvention, Side};
use crate::lattice::{annihilator, covolume, fundamental_domain, SetOnGroup, Subgroup};

/// Below `ZERO_TOL * scale` a float quantity counts as zero.
pub const ZERO_TOL: f64 = 1e-9;
/// Above `NONZERO_TOL * scale` a float quantity counts as nonzero; in between
/// the exact cyclotomic path decides.
pub const NONZERO_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Arithmetic {
    /// Floating point with exact confirmation of borderline values.
    Float,
    /// Exact cyclotomic arithmetic throughout.
    Exact,
}

/// Counterexample data attached to a failed condition.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Witness {
    /// An element covered `count != 1` times by the translates.
    Cover { element: Element, count: u64 },
    /// `#Omega != [G:H]`, i.e. `|Omega| != |Q_H|` in any measure convention.
    MeasureMismatch { cardinality: u64, index: u64 },
    /// `Omega + lambda` meets `Omega` for some `lambda != 0`.
    Overlap { lambda: Element },
    /// The periodized squared transform differs from `|Omega|^2` at `character`.
    FlatSum {
        character: Character,
        value: f64,
        expected: f64,
    },
    /// A Gram entry of the `H^perp` exponentials restricted to `Omega` that
    /// differs from the identity.
    Gram {
        x: Element,
        y: Element,
        value: [f64; 2],
    },
    /// Two characters that are not orthogonal on `Omega`.
    NotOrthogonal { a: Character, b: Character },
    /// Orthogonal, but the wrong number of characters for `dim L^2(Omega)`.
    Incomplete { size: u64, dimension: u64 },
}

/// Outcome of a single checker.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn pass() -> Verdict {
        Verdict {
            holds: true,
            witness: None,
        }
    }

    fn fail(w: Witness) -> Verdict {
        Verdict {
            holds: false,
            witness: Some(w),
        }
    }
}

/// Float decision with exact fallback in the undecided band.
fn decide_zero(magnitude: f64, scale: f64, mode: Arithmetic, exact: impl FnOnce() -> bool) -> bool {
    match mode {
        Arithmetic::Exact => exact(),
        Arithmetic::Float => {
            if magnitude <= ZERO_TOL * scale {
                true
            } else if magnitude > NONZERO_TOL * scale {
                false
            } else {
                exact()
            }
        }
    }
}

fn require_nonempty(omega: &SetOnGroup) -> Result<()> {
    if omega.is_empty() {
        return invalid("Omega must be nonempty");
    }
    Ok(())
}

fn require_same_group(omega: &SetOnGroup, h: &Subgroup) -> Result<()> {
    if omega.group() != h.parent() {
        return invalid("Omega and the subgroup live on different groups");
    }
    if h.side() != Side::Primal {
        return invalid("the translation subgroup must be on the primal side");
    }
    Ok(())
}

/// Condition 1: `sum_{h in H} 1_Omega(g - h) = 1` for every `g`, by integer
/// cover counts. The witness is the first uncovered element, or failing that
/// the first multiply covered one.
pub fn check_tiling(omega: &SetOnGroup, h: &Subgroup) -> Result<Verdict> {
    require_nonempty(omega)?;
    require_same_group(omega, h)?;
    let group = omega.group();
    let mut count = vec![0u64; group.size()];
    for x in omega.indices() {
        for &l in h.element_indices() {
            count[group.add_index(x, l)] += 1;
        }
    }
    // gaps are reported before overlaps
    let first = count
        .iter()
        .position(|&c| c == 0)
        .or_else(|| count.iter().position(|&c| c > 1));
    Ok(match first {
        None => Verdict::pass(),
        Some(g) => Verdict::fail(Witness::Cover {
            element: group.element_at(g),
            count: count[g],
        }),
    })
}

fn measure_matches(omega: &SetOnGroup, h: &Subgroup, mc: &MeasureConvention) -> Option<Witness> {
    if omega.measure(mc.group_weight) == covolume(h, mc) {
        None
    } else {
        Some(Witness::MeasureMismatch {
            cardinality: omega.cardinality() as u64,
            index: h.index(),
        })
    }
}

/// Condition 2: `|Omega| = |Q_H|` and the normalized translates are
/// orthonormal. Inner products of indicator translates are intersection
/// measures, so orthogonality is bit-set disjointness of `Omega` and
/// `Omega + lambda` for `lambda != 0`.
pub fn check_translates_orthonormal(
    omega: &SetOnGroup,
    h: &Subgroup,
    mc: &MeasureConvention,
) -> Result<Verdict> {
    require_nonempty(omega)?;
    require_same_group(omega, h)?;
    if let Some(w) = measure_matches(omega, h, mc) {
        return Ok(Verdict::fail(w));
    }
    for &l in h.element_indices().iter().filter(|&&l| l != 0) {
        if !omega.is_disjoint(&omega.translate(l)) {
            return Ok(Verdict::fail(Witness::Overlap {
                lambda: omega.group().element_at(l),
            }));
        }
    }
    Ok(Verdict::pass())
}

/// Condition 3 with `chi` ranging over the canonical fundamental domain of `H^perp`.
pub fn check_flat_sum(
    omega: &SetOnGroup,
    h: &Subgroup,
    mc: &MeasureConvention,
    mode: Arithmetic,
) -> Result<Verdict> {
    let perp = annihilator(h)?;
    check_flat_sum_on(omega, h, mc, mode, &fundamental_domain(&perp))
}

/// Condition 3 with `chi` ranging over a caller-supplied set of characters
/// (normally a cross section of `H^perp`).
pub fn check_flat_sum_on(
    omega: &SetOnGroup,
    h: &Subgroup,
    mc: &MeasureConvention,
    mode: Arithmetic,
    characters: &SetOnGroup,
) -> Result<Verdict> {
    require_nonempty(omega)?;
    require_same_group(omega, h)?;
    if let Some(w) = measure_matches(omega, h, mc) {
        return Ok(Verdict::fail(w));
    }
    let group = omega.group();
    let perp = annihilator(h)?;
    let card = omega.cardinality() as i64;
    let measure = to_f64(omega.measure(mc.group_weight));
    let expected = measure * measure;
    let ring = CyclotomicRing::new(group.exponent());

    // exact form with the weight divided out: sum |S(chi + chi')|^2 - #Omega^2
    let exact_defect = |chi: usize| {
        let mut acc = CyclotomicInt::constant(group.exponent(), -card * card);
        for &p in perp.element_indices() {
            acc = &acc + &character_sum(omega, group.add_index(chi, p)).norm_sqr();
        }
        acc
    };

    let spectrum = match mode {
        Arithmetic::Float => Some(dft(&FunctionOnGroup::indicator(omega, *mc))?),
        Arithmetic::Exact => None,
    };
    // a deficit (value below |Omega|^2) is reported before an excess
    let mut excess: Option<Witness> = None;
    for chi in characters.indices() {
        let (holds, value) = match &spectrum {
            Some(f) => {
                let value: f64 = perp
                    .element_indices()
                    .iter()
                    .map(|&p| f.values()[group.add_index(chi, p)].norm_sqr())
                    .sum();
                let holds = decide_zero((value - expected).abs(), expected, mode, || {
                    ring.is_zero(&exact_defect(chi))
                });
                (holds, value)
            }
            None => {
                let defect = exact_defect(chi);
                let holds = ring.is_zero(&defect);
                let w = to_f64(mc.group_weight);
                (
                    holds,
                    (defect.to_complex().re + (card * card) as f64) * w * w,
                )
            }
        };
        if !holds {
            let w = Witness::FlatSum {
                character: group.character_at(chi),
                value,
                expected,
            };
            if value < expected {
                return Ok(Verdict::fail(w));
            }
            excess.get_or_insert(w);
        }
    }
    Ok(match excess {
        Some(w) => Verdict::fail(w),
        None => Verdict::pass(),
    })
}

/// Condition 4, reduced to the delta basis of `L^2(Omega)`: both sides are
/// Hermitian forms in `f 1_Omega`, so the identity holds for all `f` iff
/// `#Omega^{-1} sum_{chi in H^perp} <chi, x - y> = delta_{xy}` for all
/// `x, y in Omega`. The Haar weight scales both sides identically.
pub fn check_parseval(
    omega: &SetOnGroup,
    h: &Subgroup,
    _mc: &MeasureConvention,
    mode: Arithmetic,
) -> Result<Verdict> {
    require_nonempty(omega)?;
    require_same_group(omega, h)?;
    let group = omega.group();
    let perp = annihilator(h)?;
    let l = group.exponent();
    let card = omega.cardinality() as f64;
    let ring = CyclotomicRing::new(l);
    let members: Vec<usize> = omega.indices().collect();
    for (i, &x) in members.iter().enumerate() {
        for &y in &members[i..] {
            let d = group.sub_index(x, y);
            let delta = if x == y { 1.0 } else { 0.0 };
            let exact = || {
                let mut s = CyclotomicInt::from_exponents(
                    l,
                    perp.element_indices()
                        .iter()
                        .map(|&p| group.pair_exponent(p, d)),
                );
                if x == y {
                    s.add_term(0, -(members.len() as i64));
                }
                ring.is_zero(&s)
            };
            let value = perp
                .element_indices()
                .iter()
                .map(|&p| root_of_unity(group.pair_exponent(p, d), l))
                .sum::<Complex64>()
                / card;
            let holds = decide_zero((value - delta).norm(), 1.0, mode, exact);
            if !holds {
                return Ok(Verdict::fail(Witness::Gram {
                    x: group.element_at(x),
                    y: group.element_at(y),
                    value: [value.re, value.im],
                }));
            }
        }
    }
    Ok(Verdict::pass())
}

/// Whether `characters` is an orthogonal basis of `L^2(Omega)`: pairwise
/// orthogonal on `Omega` and exactly `#Omega` of them.
pub fn check_spectrum(
    omega: &SetOnGroup,
    characters: &[Character],
    mode: Arithmetic,
) -> Result<Verdict> {
    require_nonempty(omega)?;
    if characters.is_empty() {
        return invalid("candidate spectrum must be nonempty");
    }
    let group = omega.group();
    let mut idx: Vec<usize> = characters
        .iter()
        .map(|c| {
            group
                .character(c.coords())
                .map(|c| group.index_of(c.coords()))
        })
        .collect::<Result<_>>()?;
    idx.sort_unstable();
    idx.dedup();
    let l = group.exponent();
    let ring = CyclotomicRing::new(l);
    let card = omega.cardinality();
    for (i, &a) in idx.iter().enumerate() {
        for &b in &idx[i + 1..] {
            let d = group.sub_index(a, b);
            let exact = || ring.is_zero(&character_sum(omega, d));
            let orthogonal = match mode {
                Arithmetic::Exact => exact(),
                Arithmetic::Float => {
                    let s: Complex64 = omega
                        .indices()
                        .map(|g| root_of_unity(group.pair_exponent(d, g), l))
                        .sum();
                    decide_zero(s.norm(), card as f64, mode, exact)
                }
            };
            if !orthogonal {
                return Ok(Verdict::fail(Witness::NotOrthogonal {
                    a: group.character_at(a),
                    b: group.character_at(b),
                }));
            }
        }
    }
    if idx.len() != card {
        return Ok(Verdict::fail(Witness::Incomplete {
            size: idx.len() as u64,
            dimension: card as u64,
        }));
    }
    Ok(Verdict::pass())
}

/// Condition 5: `H^perp` is a spectrum of `Omega`.
pub fn check_lattice_spectrum(
    omega: &SetOnGroup,
    h: &Subgroup,
    mode: Arithmetic,
) -> Result<Verdict> {
    require_same_group(omega, h)?;
    let perp = annihilator(h)?;
    let chars: Vec<Character> = perp
        .element_indices()
        .iter()
        .map(|&c| omega.group().character_at(c))
        .collect();
    check_spectrum(omega, &chars, mode)
}

/// The bracket `[phi, psi](chi + H^perp)` at canonical coset representatives
/// of `H^perp` in the dual group.
#[derive(Clone, Debug, PartialEq)]
pub struct Bracket {
    pub representatives: Vec<usize>,
    pub values: Vec<Complex64>,
}

/// `[phi, psi](chi) = |Q_{H^perp}| sum_{chi' in H^perp} F(phi)(chi + chi') conj F(psi)(chi + chi')`.
pub fn bracket(phi: &FunctionOnGroup, psi: &FunctionOnGroup, h: &Subgroup) -> Result<Bracket> {
    if phi.side() != Side::Primal || psi.side() != Side::Primal {
        return invalid("bracket expects primal functions");
    }
    if phi.group() != psi.group() || phi.group() != h.parent() {
        return invalid("functions and subgroup live on different groups");
    }
    let group = phi.group();
    let fphi = dft(phi)?;
    let fpsi = dft(psi)?;
    let perp = annihilator(h)?;
    let covol = to_f64(covolume(&perp, phi.measure()));
    let representatives: Vec<usize> = fundamental_domain(&perp).indices().collect();
    let values = representatives
        .iter()
        .map(|&chi| {
            perp.element_indices()
                .iter()
                .map(|&p| {
                    let k = group.add_index(chi, p);
                    fphi.values()[k] * fpsi.values()[k].conj()
                })
                .sum::<Complex64>()
                * covol
        })
        .collect();
    Ok(Bracket {
        representatives,
        values,
    })
}

/// Tolerance for `[phi, phi] == 1` and for direct Gram entries.
pub const BRACKET_TOL: f64 = 1e-9;

/// `[phi, phi] == 1` on every coset of `H^perp`.
pub fn bracket_is_one(phi: &FunctionOnGroup, h: &Subgroup) -> Result<bool> {
    let b = bracket(phi, phi, h)?;
    Ok(b.values
        .iter()
        .all(|v| (v - Complex64::new(1.0, 0.0)).norm() <= BRACKET_TOL))
}

/// Direct test that `{T_h phi : h in H}` is orthonormal in `L^2(G)`.
pub fn translates_orthonormal(phi: &FunctionOnGroup, h: &Subgroup) -> Result<bool> {
    if phi.side() != Side::Primal || phi.group() != h.parent() {
        return invalid("translates_orthonormal expects a primal function on the subgroup's group");
    }
    let translates: Vec<FunctionOnGroup> = h
        .element_indices()
        .iter()
        .map(|&l| phi.translate(l))
        .collect();
    for (i, a) in translates.iter().enumerate() {
        for (j, b) in translates.iter().enumerate().skip(i) {
            let want = if i == j { 1.0 } else { 0.0 };
            if (a.inner(b)? - Complex64::new(want, 0.0)).norm() > BRACKET_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The instance a report was computed for, kept when checkers disagree.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InstanceDump {
    pub factors: Vec<u64>,
    pub generators: Vec<Element>,
    pub omega: Vec<Element>,
    pub group_weight: [i64; 2],
}

/// Verdicts of all five conditions for one `(Omega, H)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub verdicts: [Verdict; 5],
    pub mode: Arithmetic,
    /// Set when the verdicts disagree, which would mean an implementation defect.
    pub defect: Option<InstanceDump>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn holds(&self) -> [bool; 5] {
        [0, 1, 2, 3, 4].map(|i| self.verdicts[i].holds)
    }

    pub fn consistent(&self) -> bool {
        self.defect.is_none()
    }

    pub fn all_true(&self) -> bool {
        self.holds().iter().all(|&b| b)
    }

    pub fn all_false(&self) -> bool {
        self.holds().iter().all(|&b| !b)
    }
}

pub const PARSEVAL_NOTE: &str =
    "condition 4 is checked on the delta basis of L^2(Omega); both sides are Hermitian forms in f 1_Omega";

/// Runs all five checkers independently and flags disagreement.
pub fn check_all(
    omega: &SetOnGroup,
    h: &Subgroup,
    mc: &MeasureConvention,
    mode: Arithmetic,
) -> Result<ConditionReport> {
    let verdicts = [
        check_tiling(omega, h)?,
        check_translates_orthonormal(omega, h, mc)?,
        check_flat_sum(omega, h, mc, mode)?,
        check_parseval(omega, h, mc, mode)?,
        check_lattice_spectrum(omega, h, mode)?,
    ];
    let first = verdicts[0].holds;
    let defect = if verdicts.iter().all(|v| v.holds == first) {
        None
    } else {
        Some(InstanceDump {
            factors: omega.group().factors().to_vec(),
            generators: h.generators().to_vec(),
            omega: omega.elements(),
            group_weight: [*mc.group_weight.numer(), *mc.group_weight.denom()],
        })
    };
    Ok(ConditionReport {
        verdicts,
        mode,
        defect,
        notes: vec![String::from(PARSEVAL_NOTE)],
    })
}

/// The three routes to the right-hand side of condition 4 for one `f`,
/// mirroring the convolution-plus-Poisson argument for "tiling implies 4".
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionRoute {
    /// `||f 1_Omega||^2`
    pub norm_sqr: f64,
    /// `|Omega|^{-1} sum_{H^perp} |F(f 1_Omega)|^2`
    pub direct: f64,
    /// `|Omega|^{-1} sum_{H^perp} F(u * u~)`, `u = f 1_Omega`
    pub convolution: Complex64,
    /// `|Omega|^{-1} |Q_H| sum_{h in H} (u * u~)(h)`, Poisson at `g = 0`
    pub poisson: Complex64,
}

/// Diagnostic only: all four numbers agree when `Omega` tiles by `H`.
pub fn parseval_via_convolution(
    f: &FunctionOnGroup,
    omega: &SetOnGroup,
    h: &Subgroup,
) -> Result<ConvolutionRoute> {
    require_nonempty(omega)?;
    require_same_group(omega, h)?;
    let mc = *f.measure();
    let u = f.mul(&FunctionOnGroup::indicator(omega, mc))?;
    let perp = annihilator(h)?;
    let measure = to_f64(omega.measure(mc.group_weight));
    let fu = dft(&u)?;
    let direct = perp
        .element_indices()
        .iter()
        .map(|&p| fu.values()[p].norm_sqr())
        .sum::<f64>()
        / measure;
    let auto = convolve(&u, &involution(&u))?;
    let fauto = dft(&auto)?;
    let convolution = perp
        .element_indices()
        .iter()
        .map(|&p| fauto.values()[p])
        .sum::<Complex64>()
        / measure;
    let poisson = h
        .element_indices()
        .iter()
        .map(|&l| auto.values()[l])
        .sum::<Complex64>()
        * (to_f64(covolume(h, &mc)) / measure);
    Ok(ConvolutionRoute {
        norm_sqr: u.norm_sqr(),
        direct,
        convolution,
        poisson,
    })
}
