use std::fmt;
use std::str::FromStr;

use super::{alternating, EmbeddingError, RegularEmbedding};
use crate::partition::OrderedPartition;

/// Text description of one embedding step of a tower.
///
/// `std <mult>`, `nest <mult>`, `alt <s_mult> <t_mult>`, or
/// `part <k_to> <partition>` for an explicit diagonal pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EmbeddingDescriptor {
    Standard(usize),
    Nest(usize),
    Alternating { s: usize, t: usize },
    Partition(OrderedPartition),
}

impl EmbeddingDescriptor {
    /// The embedding out of `T_{k_from}`.
    pub fn embedding(&self, k_from: usize) -> Result<RegularEmbedding, EmbeddingError> {
        match self {
            EmbeddingDescriptor::Partition(p) if p.block_count() != k_from => {
                Err(EmbeddingError::ShapeMismatch(format!(
                    "partition has {} blocks but the level has dimension {k_from}",
                    p.block_count()
                )))
            }
            EmbeddingDescriptor::Partition(p) => Ok(RegularEmbedding::from_partition(p.clone())),
            _ => {
                let (s, t) = self.split().expect("tensor descriptors always split");
                Ok(alternating(k_from, s, t))
            }
        }
    }

    /// `Some((s, t))` when the step is `A ↦ I_s ⊗ A ⊗ I_t`. Explicit
    /// partitions are recognised when they have that pattern.
    pub fn split(&self) -> Option<(usize, usize)> {
        match self {
            EmbeddingDescriptor::Standard(m) => Some((*m, 1)),
            EmbeddingDescriptor::Nest(m) => Some((1, *m)),
            EmbeddingDescriptor::Alternating { s, t } => Some((*s, *t)),
            EmbeddingDescriptor::Partition(p) => super::interval_form(p),
        }
    }

    /// `k_to / k_from`.
    pub fn ratio(&self) -> usize {
        match self {
            EmbeddingDescriptor::Standard(m) | EmbeddingDescriptor::Nest(m) => *m,
            EmbeddingDescriptor::Alternating { s, t } => s * t,
            EmbeddingDescriptor::Partition(p) => p.block_size(),
        }
    }

    /// Source dimension this descriptor requires, if fixed.
    pub fn fixed_source(&self) -> Option<usize> {
        match self {
            EmbeddingDescriptor::Partition(p) => Some(p.block_count()),
            _ => None,
        }
    }
}

impl fmt::Display for EmbeddingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbeddingDescriptor::Standard(m) => write!(f, "std {m}"),
            EmbeddingDescriptor::Nest(m) => write!(f, "nest {m}"),
            EmbeddingDescriptor::Alternating { s, t } => write!(f, "alt {s} {t}"),
            EmbeddingDescriptor::Partition(p) => write!(f, "part {} {p}", p.ground_size()),
        }
    }
}

impl FromStr for EmbeddingDescriptor {
    type Err = EmbeddingError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let invalid = || EmbeddingError::InvalidDescriptor(text.trim().to_string());
        let mut words = text.split_whitespace();
        let kind = words.next().ok_or_else(invalid)?;
        let mut positive = || -> Result<usize, EmbeddingError> {
            let v: usize = words.next().ok_or_else(invalid)?.parse().map_err(|_| invalid())?;
            if v == 0 {
                return Err(EmbeddingError::ZeroMultiplicity);
            }
            Ok(v)
        };
        let desc = match kind {
            "std" => EmbeddingDescriptor::Standard(positive()?),
            "nest" => EmbeddingDescriptor::Nest(positive()?),
            "alt" => {
                let s = positive()?;
                let t = positive()?;
                EmbeddingDescriptor::Alternating { s, t }
            }
            "part" => {
                let k_to = positive()?;
                let rest: Vec<&str> = words.collect();
                let p: OrderedPartition = rest.join(" ").parse()?;
                if p.ground_size() != k_to {
                    return Err(EmbeddingError::ShapeMismatch(format!(
                        "declared k_to={k_to} but partition covers 1..={}",
                        p.ground_size()
                    )));
                }
                return Ok(EmbeddingDescriptor::Partition(p));
            }
            _ => return Err(invalid()),
        };
        if words.next().is_some() {
            return Err(invalid());
        }
        Ok(desc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for text in ["std 2", "nest 3", "alt 2 5", "part 4 m=4 n=2 blocks=1,3;2,4"] {
            let d: EmbeddingDescriptor = text.parse().unwrap();
            assert_eq!(d.to_string(), text);
        }
        assert!("alt 2".parse::<EmbeddingDescriptor>().is_err());
        assert!("std 0".parse::<EmbeddingDescriptor>().is_err());
        assert!("std 2 3".parse::<EmbeddingDescriptor>().is_err());
        assert!("spin 2".parse::<EmbeddingDescriptor>().is_err());
        assert!("part 5 m=4 n=2 blocks=1,3;2,4".parse::<EmbeddingDescriptor>().is_err());
    }

    #[test]
    fn partition_descriptors_split_when_tensor_shaped() {
        let d: EmbeddingDescriptor = "part 8 m=8 n=2 blocks=1,2,5,6;3,4,7,8".parse().unwrap();
        assert_eq!(d.split(), Some((2, 2)));
        assert_eq!(d.ratio(), 4);
        let d: EmbeddingDescriptor = "part 8 m=8 n=2 blocks=1,2,3,5;4,6,7,8".parse().unwrap();
        assert_eq!(d.split(), None);
        assert!(d.embedding(3).is_err());
        assert!(d.embedding(2).is_ok());
    }
}
