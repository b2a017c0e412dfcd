use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryForm {
    /// `m_r = max(M, ⌈C (ln r)²⌉)`
    Max,
    /// `m_r = ⌈C (ln r)² + M⌉`
    Additive,
}

/// Per-arm storage limit as a function of the round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemorySchedule {
    pub form: MemoryForm,
    pub floor: u64,
    pub coefficient: f64,
}

impl MemorySchedule {
    pub fn max_form(floor: u64, coefficient: f64) -> Self {
        MemorySchedule {
            form: MemoryForm::Max,
            floor,
            coefficient,
        }
    }

    pub fn additive(floor: u64) -> Self {
        MemorySchedule {
            form: MemoryForm::Additive,
            floor,
            coefficient: 1.0,
        }
    }

    /// Storage limit `m_r` at round `round` (1-based). Never below
    /// `max(floor, 1)` and nondecreasing in `round`.
    pub fn capacity(&self, round: u64) -> usize {
        let l = (round.max(1) as f64).ln();
        let poly = self.coefficient * l * l;
        let m = match self.form {
            MemoryForm::Max => (poly.ceil() as u64).max(self.floor),
            MemoryForm::Additive => (poly + self.floor as f64).ceil() as u64,
        };
        m.max(1) as usize
    }
}

impl std::str::FromStr for MemorySchedule {
    type Err = crate::Error;

    /// Parses `additive:50`, `max:50` or `max:50:2.0`.
    fn from_str(s: &str) -> crate::Result<Self> {
        let bad = || crate::Error::Argument(format!("bad memory schedule {s:?}"));
        let mut parts = s.split(':');
        let form = match parts.next() {
            Some("additive") => MemoryForm::Additive,
            Some("max") => MemoryForm::Max,
            _ => return Err(bad()),
        };
        let floor = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let coefficient = match parts.next() {
            Some(c) => c.parse().map_err(|_| bad())?,
            None => 1.0,
        };
        if parts.next().is_some() || !(coefficient > 0.0) {
            return Err(bad());
        }
        Ok(MemorySchedule {
            form,
            floor,
            coefficient,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_capacities() {
        // (ln 10^4)^2 = 84.83
        assert_eq!(MemorySchedule::max_form(50, 1.0).capacity(10_000), 85);
        assert_eq!(MemorySchedule::additive(50).capacity(10_000), 135);
        assert_eq!(MemorySchedule::additive(50).capacity(1), 50);
        assert_eq!(MemorySchedule::max_form(50, 1.0).capacity(2), 50);
        assert_eq!(MemorySchedule::max_form(0, 1.0).capacity(1), 1);
    }

    #[test]
    fn nondecreasing() {
        for s in [MemorySchedule::additive(50), MemorySchedule::max_form(3, 0.5)] {
            let caps: Vec<_> = (1..5000).map(|r| s.capacity(r)).collect();
            assert!(caps.windows(2).all(|w| w[0] <= w[1]));
            assert!(caps.iter().all(|&c| c >= s.floor.max(1) as usize));
        }
    }

    #[test]
    fn parse() {
        assert_eq!("additive:50".parse::<MemorySchedule>().unwrap(), MemorySchedule::additive(50));
        assert_eq!(
            "max:20:2.5".parse::<MemorySchedule>().unwrap(),
            MemorySchedule::max_form(20, 2.5)
        );
        assert!("foo:1".parse::<MemorySchedule>().is_err());
        assert!("max".parse::<MemorySchedule>().is_err());
    }
}
