use serde::{Deserialize, Serialize};

use super::{DecisionError, MeasurementFamily};

/// Event spaces are enumerated as bitmasks, so a measurement may have at most
/// this many outcomes when an ordering is built over it.
pub const MAX_OUTCOMES_PER_MEASUREMENT: usize = 20;

/// Dense position of an event within an [`EventSpace`].
pub type EventIndex = usize;

/// An event `E|M`: a measurement id and the outcome labels in `E`, listed in
/// the measurement's outcome order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EventRef {
    pub measurement: String,
    pub event: Vec<String>,
}

impl EventRef {
    pub fn new<S: Into<String>>(measurement: impl Into<String>, event: impl IntoIterator<Item = S>) -> Self {
        Self {
            measurement: measurement.into(),
            event: event.into_iter().map(Into::into).collect(),
        }
    }
}

impl std::fmt::Display for EventRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}}}|{}", self.event.join(","), self.measurement)
    }
}

/// Enumeration of the total event space of a family.
///
/// Events of measurement `m` occupy `offsets[m]..offsets[m] + 2^n_m`, indexed
/// by bitmask, so index order is (measurement id, bitmask).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSpace {
    offsets: Vec<usize>,
    sizes: Vec<usize>,
    total: usize,
}

impl EventSpace {
    pub fn new(family: &MeasurementFamily, max_events: usize) -> Result<Self, DecisionError> {
        let mut offsets = Vec::with_capacity(family.len());
        let mut sizes = Vec::with_capacity(family.len());
        let mut total = 0usize;
        for m in family.measurements() {
            if m.len() > MAX_OUTCOMES_PER_MEASUREMENT {
                return Err(DecisionError::TooManyOutcomes {
                    id: m.id().to_owned(),
                    outcomes: m.len(),
                    max: MAX_OUTCOMES_PER_MEASUREMENT,
                });
            }
            offsets.push(total);
            sizes.push(m.len());
            total += 1usize << m.len();
            if total > max_events {
                return Err(DecisionError::EventSpaceTooLarge {
                    events: total,
                    max: max_events,
                });
            }
        }
        Ok(Self {
            offsets,
            sizes,
            total,
        })
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn measurement_count(&self) -> usize {
        self.offsets.len()
    }

    pub fn outcome_count(&self, measurement: usize) -> usize {
        self.sizes[measurement]
    }

    pub fn index(&self, measurement: usize, mask: u64) -> EventIndex {
        debug_assert!(mask < 1 << self.sizes[measurement]);
        self.offsets[measurement] + mask as usize
    }

    /// `∅|M`.
    pub fn empty_event(&self, measurement: usize) -> EventIndex {
        self.offsets[measurement]
    }

    /// `S_M|M`.
    pub fn full_event(&self, measurement: usize) -> EventIndex {
        self.offsets[measurement] + (1usize << self.sizes[measurement]) - 1
    }

    /// Inverse of [`EventSpace::index`].
    pub fn locate(&self, index: EventIndex) -> (usize, u64) {
        let m = self.offsets.partition_point(|&o| o <= index) - 1;
        (m, (index - self.offsets[m]) as u64)
    }

    pub fn range(&self, measurement: usize) -> std::ops::Range<EventIndex> {
        let start = self.offsets[measurement];
        start..start + (1usize << self.sizes[measurement])
    }

    pub fn event_ref(&self, family: &MeasurementFamily, index: EventIndex) -> EventRef {
        let (m, mask) = self.locate(index);
        let meas = &family.measurements()[m];
        EventRef {
            measurement: meas.id().to_owned(),
            event: meas.labels_of_mask(mask),
        }
    }

    pub fn resolve(&self, family: &MeasurementFamily, event: &EventRef) -> Result<EventIndex, DecisionError> {
        let m = family
            .index_of(&event.measurement)
            .ok_or_else(|| DecisionError::UnknownMeasurement(event.measurement.clone()))?;
        let mask = family.measurements()[m].mask_of(&event.event)?;
        Ok(self.index(m, mask))
    }
}
