//! The four direct F-transforms and their matched inverses.
//!
//! | kind               | component                      | inverse                          |
//! |--------------------|--------------------------------|----------------------------------|
//! | `upper-theta`      | `∨_x θ(A_j(x), f(x))`          | `∧_j I_θ(A_j(x), F_j)`           |
//! | `lower-eta`        | `∧_x η(N(A_j(x)), f(x))`       | `∨_j I_η(N(A_j(x)), F_j)`        |
//! | `upper-coresidual` | `∨_x I_η(N(A_j(x)), f(x))`     | `∧_j η(N(A_j(x)), F_j)`          |
//! | `lower-residual`   | `∧_x I_θ(A_j(x), f(x))`        | `∨_j θ(A_j(x), F_j)`             |

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectives::{Connective, ConnectiveKind, Negator};
use crate::exec::Exec;
use crate::lattice::Lattice;
use crate::partitions::LFuzzyPartition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("{kind} needs a {expected} connective, got {found}")]
    KindMismatch {
        kind: DirectKind,
        expected: ConnectiveKind,
        found: ConnectiveKind,
    },
    #[error("operands live on different carriers")]
    CarrierMismatch,
    #[error("{0} needs a negator")]
    MissingNegator(DirectKind),
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectKind {
    UpperTheta,
    LowerEta,
    UpperCoresidual,
    LowerResidual,
}

impl DirectKind {
    pub const ALL: [DirectKind; 4] = [
        DirectKind::UpperTheta,
        DirectKind::LowerEta,
        DirectKind::UpperCoresidual,
        DirectKind::LowerResidual,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DirectKind::UpperTheta => "upper-theta",
            DirectKind::LowerEta => "lower-eta",
            DirectKind::UpperCoresidual => "upper-coresidual",
            DirectKind::LowerResidual => "lower-residual",
        }
    }

    pub fn parse(s: &str) -> Option<DirectKind> {
        DirectKind::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn is_upper(self) -> bool {
        matches!(self, DirectKind::UpperTheta | DirectKind::UpperCoresidual)
    }

    /// Connective used by the direct transform.
    pub fn connective(self) -> ConnectiveKind {
        match self {
            DirectKind::UpperTheta => ConnectiveKind::Overlap,
            DirectKind::LowerEta => ConnectiveKind::Grouping,
            DirectKind::UpperCoresidual => ConnectiveKind::CoResidual,
            DirectKind::LowerResidual => ConnectiveKind::Residual,
        }
    }

    /// Connective used by the matched inverse.
    pub fn inverse_connective(self) -> ConnectiveKind {
        match self {
            DirectKind::UpperTheta => ConnectiveKind::Residual,
            DirectKind::LowerEta => ConnectiveKind::CoResidual,
            DirectKind::UpperCoresidual => ConnectiveKind::Grouping,
            DirectKind::LowerResidual => ConnectiveKind::Overlap,
        }
    }

    /// The η and I_η transforms feed `N(A_j(x))` to the connective.
    pub fn needs_negator(self) -> bool {
        matches!(self, DirectKind::LowerEta | DirectKind::UpperCoresidual)
    }

    pub fn inverse_name(self) -> &'static str {
        match self {
            DirectKind::UpperTheta => "inverse-upper-residual",
            DirectKind::LowerEta => "inverse-lower-coresidual",
            DirectKind::UpperCoresidual => "inverse-upper-eta",
            DirectKind::LowerResidual => "inverse-lower-theta",
        }
    }
}

impl fmt::Display for DirectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Components indexed by the partition's member order.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectTransform<V> {
    pub kind: DirectKind,
    pub labels: Vec<String>,
    pub components: Vec<V>,
    pub connective: String,
    pub negator: Option<String>,
}

fn check<L: Lattice>(
    kind: DirectKind,
    expected: ConnectiveKind,
    p: &LFuzzyPartition<L>,
    conn: &Connective<L>,
    neg: Option<&Negator<L>>,
    len: usize,
    want: usize,
) -> Result<(), TransformError> {
    if conn.kind() != expected {
        return Err(TransformError::KindMismatch {
            kind,
            expected,
            found: conn.kind(),
        });
    }
    if !conn.on_carrier(p.lattice()) || neg.is_some_and(|n| !n.on_carrier(p.lattice())) {
        return Err(TransformError::CarrierMismatch);
    }
    if kind.needs_negator() && neg.is_none() {
        return Err(TransformError::MissingNegator(kind));
    }
    if len != want {
        return Err(TransformError::LengthMismatch { expected: want, found: len });
    }
    Ok(())
}

/// The four direct transforms of `f`.
pub fn direct_transform<L: Lattice>(
    kind: DirectKind,
    p: &LFuzzyPartition<L>,
    conn: &Connective<L>,
    neg: Option<&Negator<L>>,
    f: &[L::Value],
) -> Result<DirectTransform<L::Value>, TransformError> {
    direct_transform_with(Exec::default(), kind, p, conn, neg, f)
}

pub fn direct_transform_with<L: Lattice>(
    exec: Exec,
    kind: DirectKind,
    p: &LFuzzyPartition<L>,
    conn: &Connective<L>,
    neg: Option<&Negator<L>>,
    f: &[L::Value],
) -> Result<DirectTransform<L::Value>, TransformError> {
    check(kind, kind.connective(), p, conn, neg, f.len(), p.points())?;
    Ok(DirectTransform {
        kind,
        labels: p.labels().to_vec(),
        components: direct_components(exec, kind, p, conn, neg, f),
        connective: conn.name().to_string(),
        negator: neg.filter(|_| kind.needs_negator()).map(|n| n.name().to_string()),
    })
}

/// Unchecked direct transform; callers guarantee kinds and carriers.
pub fn direct_components<L: Lattice>(
    exec: Exec,
    kind: DirectKind,
    p: &LFuzzyPartition<L>,
    conn: &Connective<L>,
    neg: Option<&Negator<L>>,
    f: &[L::Value],
) -> Vec<L::Value> {
    let l = p.lattice();
    let component = |j: usize| {
        let a = &p.members()[j];
        let terms = (0..f.len()).map(|x| match kind {
            DirectKind::UpperTheta | DirectKind::LowerResidual => conn.apply(a[x], f[x]),
            DirectKind::LowerEta | DirectKind::UpperCoresidual => {
                conn.apply(neg.expect("checked").apply(a[x]), f[x])
            }
        });
        if kind.is_upper() {
            l.join_all(terms)
        } else {
            l.meet_all(terms)
        }
        .expect("universe is nonempty")
    };
    exec.for_size(p.len() * f.len()).map(0..p.len(), component)
}

/// The matched inverse of `t`; `conn` must be the inverse connective.
pub fn inverse_transform<L: Lattice>(
    p: &LFuzzyPartition<L>,
    conn: &Connective<L>,
    neg: Option<&Negator<L>>,
    t: &DirectTransform<L::Value>,
) -> Result<Vec<L::Value>, TransformError> {
    inverse_transform_with(Exec::default(), p, conn, neg, t.kind, &t.components)
}

pub fn inverse_transform_with<L: Lattice>(
    exec: Exec,
    p: &LFuzzyPartition<L>,
    conn: &Connective<L>,
    neg: Option<&Negator<L>>,
    kind: DirectKind,
    components: &[L::Value],
) -> Result<Vec<L::Value>, TransformError> {
    check(kind, kind.inverse_connective(), p, conn, neg, components.len(), p.len())?;
    Ok(inverse_values(exec, kind, p, conn, neg, components))
}

/// Unchecked inverse transform.
pub fn inverse_values<L: Lattice>(
    exec: Exec,
    kind: DirectKind,
    p: &LFuzzyPartition<L>,
    conn: &Connective<L>,
    neg: Option<&Negator<L>>,
    components: &[L::Value],
) -> Vec<L::Value> {
    let l = p.lattice();
    let point = |x: usize| {
        let terms = (0..p.len()).map(|j| {
            let a = p.value(j, x);
            match kind {
                DirectKind::UpperTheta | DirectKind::LowerResidual => conn.apply(a, components[j]),
                DirectKind::LowerEta | DirectKind::UpperCoresidual => {
                    conn.apply(neg.expect("checked").apply(a), components[j])
                }
            }
        });
        // Upper components are recovered by a meet, lower ones by a join.
        if kind.is_upper() {
            l.meet_all(terms)
        } else {
            l.join_all(terms)
        }
        .expect("partition is nonempty")
    };
    exec.for_size(p.len() * p.points()).map(0..p.points(), point)
}
