//! Classification data: K-groups of fermionic Gaussian states and operations
//! in the ten classes, the bosonic operation groups, homotopy groups of the
//! classifying spaces and the operation-to-state homomorphism with its
//! refined labels.

use crate::error::{Error, Result};
use crate::symmetry::{AZClass, Trs};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KGroup {
    #[serde(rename = "0")]
    Zero,
    Z,
    #[serde(rename = "2Z")]
    TwoZ,
    Z2,
    #[serde(rename = "ZxZ")]
    ZxZ,
    #[serde(rename = "Z2xZ2")]
    Z2xZ2,
    #[serde(rename = "2Zx2Z")]
    TwoZxTwoZ,
}

impl KGroup {
    pub fn is_trivial(self) -> bool {
        self == KGroup::Zero
    }

    /// Number of elements, None when infinite.
    pub fn order(self) -> Option<u64> {
        match self {
            KGroup::Zero => Some(1),
            KGroup::Z2 => Some(2),
            KGroup::Z2xZ2 => Some(4),
            _ => None,
        }
    }

    /// G x G.
    pub fn squared(self) -> KGroup {
        match self {
            KGroup::Zero => KGroup::Zero,
            KGroup::Z => KGroup::ZxZ,
            KGroup::TwoZ => KGroup::TwoZxTwoZ,
            KGroup::Z2 => KGroup::Z2xZ2,
            g => g,
        }
    }

    /// Number of direct factors.
    pub fn rank(self) -> usize {
        match self {
            KGroup::Zero => 0,
            KGroup::ZxZ | KGroup::Z2xZ2 | KGroup::TwoZxTwoZ => 2,
            _ => 1,
        }
    }

    fn is_free(self) -> bool {
        matches!(self, KGroup::Z | KGroup::TwoZ | KGroup::ZxZ | KGroup::TwoZxTwoZ)
    }

    /// Whether `self` can sit inside `parent` as a subgroup.
    pub fn embeds_in(self, parent: KGroup) -> bool {
        if self.is_trivial() {
            return true;
        }
        if self.is_free() != parent.is_free() {
            return false;
        }
        self.rank() <= parent.rank()
    }
}

impl fmt::Display for KGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            KGroup::Zero => "0",
            KGroup::Z => "Z",
            KGroup::TwoZ => "2Z",
            KGroup::Z2 => "Z2",
            KGroup::ZxZ => "ZxZ",
            KGroup::Z2xZ2 => "Z2xZ2",
            KGroup::TwoZxTwoZ => "2Zx2Z",
        };
        f.write_str(s)
    }
}

impl FromStr for KGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "0" => KGroup::Zero,
            "Z" => KGroup::Z,
            "2Z" => KGroup::TwoZ,
            "Z2" => KGroup::Z2,
            "ZxZ" | "Z^2" => KGroup::ZxZ,
            "Z2xZ2" | "Z2^2" => KGroup::Z2xZ2,
            "2Zx2Z" | "2Z^2" => KGroup::TwoZxTwoZ,
            _ => return Err(Error::Parse(format!("unknown group '{s}'"))),
        })
    }
}

/// Kind of topological order of a tabulated nontrivial entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderLabel {
    Intrinsic,
    /// Symmetry-enriched.
    Set,
    /// Symmetry-protected.
    Spt,
    /// Odd values symmetry-enriched, even values symmetry-protected.
    SetOddSptEven,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomomorphismInfo {
    pub class: AZClass,
    pub d: usize,
    pub state_group: KGroup,
    pub op_group: KGroup,
    /// Disentanglable states (image of the operation group).
    pub image: KGroup,
    pub quotient_nondisentanglable: KGroup,
    pub kernel_genuinely_dynamical: KGroup,
    /// Keys "disentanglable", "non-disentanglable", "genuinely-dynamical";
    /// present only for nontrivial entries.
    pub order_labels: BTreeMap<String, OrderLabel>,
}

/// Classifying space label: complex C_q (q mod 2) or real R_q (q mod 8),
/// squared when `doubled`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Space {
    pub real: bool,
    pub q: usize,
    pub doubled: bool,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", if self.real { "R" } else { "C" }, self.q, if self.doubled { "^2" } else { "" })
    }
}

impl FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, doubled) = match s.strip_suffix("^2") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let real = match body.chars().next() {
            Some('R') => true,
            Some('C') => false,
            _ => return Err(Error::Parse(format!("unknown classifying space '{s}'"))),
        };
        let q: usize = body[1..].parse().map_err(|_| Error::Parse(format!("unknown classifying space '{s}'")))?;
        if q >= if real { 8 } else { 2 } {
            return Err(Error::Parse(format!("classifying space index out of range in '{s}'")));
        }
        Ok(Space { real, q, doubled })
    }
}

const fn c(q: usize) -> Space {
    Space { real: false, q, doubled: false }
}
const fn r(q: usize) -> Space {
    Space { real: true, q, doubled: false }
}
const fn c2(q: usize) -> Space {
    Space { real: false, q, doubled: true }
}
const fn r2(q: usize) -> Space {
    Space { real: true, q, doubled: true }
}

/// (state space, operation space) per class, in `AZClass::ALL` order.
const SPACES: [(Space, Space); 10] = [
    (c(0), c(1)),
    (c(1), c2(1)),
    (r(0), r(1)),
    (r(1), r2(1)),
    (r(2), r(1)),
    (r(3), c(1)),
    (r(4), r(5)),
    (r(5), r2(5)),
    (r(6), r(5)),
    (r(7), c(1)),
];

pub fn classifying_spaces(class: AZClass) -> (Space, Space) {
    SPACES[class.index()]
}

use KGroup::{TwoZ as Z2Z, TwoZxTwoZ as Z2Z2, Z2xZ2 as Z2S, Zero as O, ZxZ as ZZ, Z, Z2};

/// pi_0 of R_q and C_q.
const PI0_REAL: [KGroup; 8] = [Z, Z2, Z2, O, Z2Z, O, O, O];
const PI0_COMPLEX: [KGroup; 2] = [Z, O];

/// pi_d(X_q) = pi_0(X_{q-d}).
pub fn bott_table(space: Space, d: usize) -> KGroup {
    let g = if space.real { PI0_REAL[(space.q + 8 - d % 8) % 8] } else { PI0_COMPLEX[(space.q + 2 - d % 2) % 2] };
    if space.doubled {
        g.squared()
    } else {
        g
    }
}

const STATES: [[KGroup; 8]; 10] = [
    [Z, O, Z, O, Z, O, Z, O],
    [O, Z, O, Z, O, Z, O, Z],
    [Z, O, O, O, Z2Z, O, Z2, Z2],
    [Z2, Z, O, O, O, Z2Z, O, Z2],
    [Z2, Z2, Z, O, O, O, Z2Z, O],
    [O, Z2, Z2, Z, O, O, O, Z2Z],
    [Z2Z, O, Z2, Z2, Z, O, O, O],
    [O, Z2Z, O, Z2, Z2, Z, O, O],
    [O, O, Z2Z, O, Z2, Z2, Z, O],
    [O, O, O, Z2Z, O, Z2, Z2, Z],
];

const OPS: [[KGroup; 8]; 10] = [
    [O, Z, O, Z, O, Z, O, Z],
    [O, ZZ, O, ZZ, O, ZZ, O, ZZ],
    [Z2, Z, O, O, O, Z2Z, O, Z2],
    [Z2S, ZZ, O, O, O, Z2Z2, O, Z2S],
    [Z2, Z, O, O, O, Z2Z, O, Z2],
    [O, Z, O, Z, O, Z, O, Z],
    [O, Z2Z, O, Z2, Z2, Z, O, O],
    [O, Z2Z2, O, Z2S, Z2S, ZZ, O, O],
    [O, Z2Z, O, Z2, Z2, Z, O, O],
    [O, Z, O, Z, O, Z, O, Z],
];

/// Disentanglable states (= state-like operations).
const IMAGE: [[KGroup; 8]; 10] = [
    [O, O, O, O, O, O, O, O],
    [O, Z, O, Z, O, Z, O, Z],
    [O, O, O, O, O, O, O, O],
    [Z2, Z, O, O, O, Z2Z, O, Z2],
    [Z2, Z2, O, O, O, O, O, O],
    [O, Z2, O, Z2Z, O, O, O, Z2Z],
    [O, O, O, O, O, O, O, O],
    [O, Z2Z, O, Z2, Z2, Z, O, O],
    [O, O, O, O, Z2, Z2, O, O],
    [O, O, O, Z2Z, O, Z2, O, Z2Z],
];

const NON_DISENTANGLABLE: [[KGroup; 8]; 10] = [
    [Z, O, Z, O, Z, O, Z, O],
    [O, O, O, O, O, O, O, O],
    [Z, O, O, O, Z2Z, O, Z2, Z2],
    [O, O, O, O, O, O, O, O],
    [O, O, Z, O, O, O, Z2Z, O],
    [O, O, Z2, Z2, O, O, O, O],
    [Z2Z, O, Z2, Z2, Z, O, O, O],
    [O, O, O, O, O, O, O, O],
    [O, O, Z2Z, O, O, O, Z, O],
    [O, O, O, O, O, O, Z2, Z2],
];

const GENUINELY_DYNAMICAL: [[KGroup; 8]; 10] = [
    [O, Z, O, Z, O, Z, O, Z],
    [O, Z, O, Z, O, Z, O, Z],
    [Z2, Z, O, O, O, Z2Z, O, Z2],
    [Z2, Z, O, O, O, Z2Z, O, Z2],
    [O, Z2Z, O, O, O, Z2Z, O, Z2],
    [O, Z2Z, O, O, O, Z, O, O],
    [O, Z2Z, O, Z2, Z2, Z, O, O],
    [O, Z2Z, O, Z2, Z2, Z, O, O],
    [O, Z2Z, O, Z2, O, Z2Z, O, O],
    [O, Z, O, O, O, Z2Z, O, O],
];

/// Order labels that differ from symmetry-protected, as (class, d, table,
/// label) with table 0 = disentanglable, 1 = non-disentanglable,
/// 2 = genuinely dynamical.
const SPECIAL_LABELS: &[(AZClass, usize, usize, OrderLabel)] = {
    use AZClass::*;
    use OrderLabel::*;
    &[
        (BDI, 0, 0, Set),
        (BDI, 1, 0, SetOddSptEven),
        (D, 0, 0, Intrinsic),
        (D, 1, 0, Intrinsic),
        (A, 2, 1, Set),
        (A, 6, 1, Set),
        (D, 2, 1, Intrinsic),
        (D, 6, 1, Intrinsic),
        (C, 2, 1, Set),
        (C, 6, 1, Set),
        (A, 1, 2, Set),
        (A, 5, 2, Set),
        (A, 7, 2, SetOddSptEven),
        (AIII, 1, 2, Set),
        (AIII, 5, 2, Set),
        (AI, 1, 2, Set),
        (AI, 5, 2, Set),
        (BDI, 1, 2, Set),
        (BDI, 5, 2, Set),
        (D, 1, 2, Intrinsic),
        (D, 5, 2, Intrinsic),
        (D, 7, 2, Intrinsic),
        (DIII, 1, 2, Set),
        (DIII, 5, 2, Set),
        (AII, 1, 2, Set),
        (AII, 5, 2, Set),
        (CII, 1, 2, Set),
        (CII, 5, 2, Set),
        (C, 1, 2, Set),
        (C, 5, 2, Set),
        (CI, 1, 2, Set),
        (CI, 5, 2, Set),
    ]
};

pub const LABEL_KEYS: [&str; 3] = ["disentanglable", "non-disentanglable", "genuinely-dynamical"];

pub fn classify_states(class: AZClass, d: usize) -> KGroup {
    STATES[class.index()][d % 8]
}

pub fn classify_ops(class: AZClass, d: usize) -> KGroup {
    OPS[class.index()][d % 8]
}

/// Bosonic operations reduce to fermionic ones with U(1) symmetry: class A,
/// AI or AII depending on time reversal.
pub fn classify_boson_ops(trs: Trs, d: usize) -> KGroup {
    let class = match trs {
        Trs::None => AZClass::A,
        Trs::Plus => AZClass::AI,
        Trs::Minus => AZClass::AII,
    };
    classify_ops(class, d)
}

/// Short-range correlated bosonic Gaussian states are all trivial.
pub fn classify_boson_states(_trs: Trs, _d: usize) -> KGroup {
    KGroup::Zero
}

pub fn homomorphism_info(class: AZClass, d: usize) -> HomomorphismInfo {
    let (i, dd) = (class.index(), d % 8);
    let groups = [IMAGE[i][dd], NON_DISENTANGLABLE[i][dd], GENUINELY_DYNAMICAL[i][dd]];
    let mut order_labels = BTreeMap::new();
    for (t, g) in groups.iter().enumerate() {
        if g.is_trivial() {
            continue;
        }
        let label = SPECIAL_LABELS
            .iter()
            .find(|(c, dl, tl, _)| *c == class && *dl == dd && *tl == t)
            .map_or(OrderLabel::Spt, |e| e.3);
        order_labels.insert(LABEL_KEYS[t].to_string(), label);
    }
    HomomorphismInfo {
        class,
        d,
        state_group: classify_states(class, d),
        op_group: classify_ops(class, d),
        image: groups[0],
        quotient_nondisentanglable: groups[1],
        kernel_genuinely_dynamical: groups[2],
        order_labels,
    }
}

/// Every (class, d) entry for d = 0..7.
pub fn all_entries() -> Vec<HomomorphismInfo> {
    AZClass::ALL.iter().flat_map(|&c| (0..8).map(move |d| homomorphism_info(c, d))).collect()
}

/// Every table as JSON: per-class rows of groups for d = 0..7, the order
/// labels of nontrivial entries and the classifying spaces.
pub fn dump() -> serde_json::Value {
    use serde_json::{json, Map, Value};
    let rows = |f: &dyn Fn(AZClass, usize) -> KGroup| -> Value {
        let mut m = Map::new();
        for c in AZClass::ALL {
            m.insert(c.to_string(), (0..8).map(|d| f(c, d).to_string()).collect());
        }
        Value::Object(m)
    };
    let keys = ["disentanglable", "non_disentanglable", "genuinely_dynamical"];
    let mut labels = Vec::new();
    for info in all_entries() {
        for (key, name) in LABEL_KEYS.iter().zip(keys) {
            if let Some(l) = info.order_labels.get(*key) {
                labels.push(json!({"class": info.class.to_string(), "d": info.d, "table": name, "label": l}));
            }
        }
    }
    let mut spaces = Map::new();
    for c in AZClass::ALL {
        let (s, o) = classifying_spaces(c);
        spaces.insert(c.to_string(), json!([s.to_string(), o.to_string()]));
    }
    json!({
        "states": rows(&classify_states),
        "ops": rows(&classify_ops),
        "disentanglable": rows(&|c, d| homomorphism_info(c, d).image),
        "non_disentanglable": rows(&|c, d| homomorphism_info(c, d).quotient_nondisentanglable),
        "genuinely_dynamical": rows(&|c, d| homomorphism_info(c, d).kernel_genuinely_dynamical),
        "labels": labels,
        "spaces": spaces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_entries() {
        assert_eq!(classify_states(AZClass::D, 2), KGroup::Z);
        assert_eq!(classify_states(AZClass::A, 1), KGroup::Zero);
        assert_eq!(classify_states(AZClass::DIII, 3), KGroup::Z);
        assert_eq!(classify_ops(AZClass::A, 1), KGroup::Z);
        assert_eq!(classify_ops(AZClass::D, 2), KGroup::Zero);
        assert_eq!(classify_ops(AZClass::BDI, 1), KGroup::ZxZ);
        assert_eq!(classify_boson_ops(Trs::None, 1), KGroup::Z);
        assert_eq!(classify_boson_ops(Trs::Plus, 1), KGroup::Z);
        assert_eq!(classify_boson_ops(Trs::None, 2), KGroup::Zero);
        for (t, d) in [(Trs::None, 1), (Trs::Plus, 2), (Trs::Minus, 3)] {
            assert_eq!(classify_boson_states(t, d), KGroup::Zero);
        }
    }

    #[test]
    fn homomorphism_examples() {
        let h = homomorphism_info(AZClass::D, 1);
        assert_eq!((h.state_group, h.op_group, h.image, h.kernel_genuinely_dynamical), (Z2, Z, Z2, Z2Z));
        let h = homomorphism_info(AZClass::AII, 3);
        assert_eq!((h.state_group, h.op_group, h.image, h.kernel_genuinely_dynamical), (Z2, Z2, O, Z2));
        let h = homomorphism_info(AZClass::DIII, 3);
        assert_eq!((h.state_group, h.op_group, h.image), (Z, Z, Z2Z));
        assert_eq!(h.order_labels["non-disentanglable"], OrderLabel::Spt);
        assert_eq!(homomorphism_info(AZClass::D, 1).order_labels["disentanglable"], OrderLabel::Intrinsic);
    }

    #[test]
    fn bott_examples() {
        assert_eq!(bott_table(c(0), 0), Z);
        assert_eq!(bott_table(c(1), 1), Z);
        assert_eq!(bott_table(r(2), 2), Z);
    }

    #[test]
    fn structural_consistency() {
        for h in all_entries() {
            assert!(h.image.embeds_in(h.state_group), "{h:?}");
            assert!(h.kernel_genuinely_dynamical.embeds_in(h.op_group), "{h:?}");
            if h.image.is_trivial() {
                assert_eq!(h.quotient_nondisentanglable, h.state_group, "{h:?}");
            }
            // |state| = |image| |quotient| when finite
            if let (Some(s), Some(i), Some(q)) =
                (h.state_group.order(), h.image.order(), h.quotient_nondisentanglable.order())
            {
                assert_eq!(s, i * q, "{h:?}");
            }
            if let (Some(o), Some(i), Some(k)) =
                (h.op_group.order(), h.image.order(), h.kernel_genuinely_dynamical.order())
            {
                assert_eq!(o, i * k, "{h:?}");
            }
            // a trivial state group has trivial image and quotient
            if h.state_group.is_trivial() {
                assert!(h.image.is_trivial() && h.quotient_nondisentanglable.is_trivial());
            }
        }
    }

    #[test]
    fn periodic_in_d() {
        for c in AZClass::ALL {
            for d in 0..8 {
                assert_eq!(homomorphism_info(c, d + 8).state_group, homomorphism_info(c, d).state_group);
                assert_eq!(classify_ops(c, d + 16), classify_ops(c, d));
            }
        }
    }

    #[test]
    fn space_parse_round_trip() {
        for (s, o) in SPACES {
            assert_eq!(s.to_string().parse::<Space>().unwrap(), s);
            assert_eq!(o.to_string().parse::<Space>().unwrap(), o);
        }
        assert!("R9".parse::<Space>().is_err());
    }
}
