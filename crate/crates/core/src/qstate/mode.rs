use std::fmt;
use std::str::FromStr;

use super::StateError;

/// Spatial port labels of the experiment.
///
/// `Loss` ports hold photons routed out of the analyzed paths by passive
/// couplers or sub-unitary transforms; they are traced over at the analysis
/// boundary. The declaration order defines the canonical mode ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spatial {
    AliceIn,
    CharlieA,
    CharlieE,
    BobIn,
    C1,
    C2,
    BobDet,
    Loss(u8),
}

impl Spatial {
    /// Loss channel of Alice's preparation coupler.
    pub const LOSS_PREP: Spatial = Spatial::Loss(0);
    /// Loss channel of Bob's analyzer coupler.
    pub const LOSS_ANALYZER: Spatial = Spatial::Loss(1);
    /// Loss channel of an auxiliary analyzer (source fringe scans).
    pub const LOSS_ANALYZER_AUX: Spatial = Spatial::Loss(2);
}

impl fmt::Display for Spatial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spatial::AliceIn => write!(f, "AliceIn"),
            Spatial::CharlieA => write!(f, "CharlieA"),
            Spatial::CharlieE => write!(f, "CharlieE"),
            Spatial::BobIn => write!(f, "BobIn"),
            Spatial::C1 => write!(f, "C1"),
            Spatial::C2 => write!(f, "C2"),
            Spatial::BobDet => write!(f, "BobDet"),
            Spatial::Loss(k) => write!(f, "Loss{k}"),
        }
    }
}

impl FromStr for Spatial {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "AliceIn" => Ok(Spatial::AliceIn),
            "CharlieA" => Ok(Spatial::CharlieA),
            "CharlieE" => Ok(Spatial::CharlieE),
            "BobIn" => Ok(Spatial::BobIn),
            "C1" => Ok(Spatial::C1),
            "C2" => Ok(Spatial::C2),
            "BobDet" => Ok(Spatial::BobDet),
            other => {
                if let Some(k) = other.strip_prefix("Loss") {
                    let k: u8 = k
                        .parse()
                        .map_err(|_| StateError::Parse(format!("bad spatial label `{other}`")))?;
                    Ok(Spatial::Loss(k))
                } else {
                    Err(StateError::Parse(format!("bad spatial label `{other}`")))
                }
            }
        }
    }
}

/// One optical mode: a port, a time-bin slot and a distinguishability tag.
///
/// The derived ordering (port, bin, tag) is the canonical order used for
/// Fock-term normal forms and for serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub spatial: Spatial,
    pub bin: u8,
    pub tag: u8,
}

impl Mode {
    pub const fn new(spatial: Spatial, bin: u8, tag: u8) -> Self {
        Mode { spatial, bin, tag }
    }

    /// Reference-wavepacket mode at the given port and bin.
    pub const fn ref_tag(spatial: Spatial, bin: u8) -> Self {
        Mode::new(spatial, bin, 0)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.b{}.t{}", self.spatial, self.bin, self.tag)
    }
}

impl FromStr for Mode {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split('.');
        let bad = || StateError::Parse(format!("bad mode token `{s}`"));
        let spatial: Spatial = parts.next().ok_or_else(bad)?.parse()?;
        let bin = parts
            .next()
            .and_then(|p| p.strip_prefix('b'))
            .and_then(|p| p.parse().ok())
            .ok_or_else(bad)?;
        let tag = parts
            .next()
            .and_then(|p| p.strip_prefix('t'))
            .and_then(|p| p.parse().ok())
            .ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Mode { spatial, bin, tag })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_ordering_is_lexicographic() {
        let a = Mode::new(Spatial::AliceIn, 1, 1);
        let b = Mode::new(Spatial::CharlieA, 0, 0);
        let c = Mode::new(Spatial::CharlieA, 0, 1);
        let d = Mode::new(Spatial::Loss(0), 0, 0);
        assert!(a < b && b < c && c < d);
        assert!(Spatial::Loss(0) < Spatial::Loss(3));
    }

    #[test]
    fn mode_roundtrips_through_text() {
        for m in [
            Mode::new(Spatial::C1, 0, 0),
            Mode::new(Spatial::BobDet, 2, 1),
            Mode::new(Spatial::Loss(4), 1, 0),
        ] {
            let s = m.to_string();
            assert_eq!(s.parse::<Mode>().unwrap(), m);
        }
    }

    #[test]
    fn bad_mode_tokens_are_rejected() {
        assert!("C9.b0.t0".parse::<Mode>().is_err());
        assert!("C1.x0.t0".parse::<Mode>().is_err());
        assert!("C1.b0".parse::<Mode>().is_err());
    }
}
