//! The waveplate, polarizing beamsplitter and number-resolving detector
//! chain, expressed as POVMs on the accessible space.

mod povm;
mod sampling;
mod span;
mod waveplate;

pub use povm::{outcome_probabilities, outcomes, povm_elements, Outcome, PovmElement};
pub use sampling::{expected_counts, simulate_counts, CountRecord};
pub use span::measurement_span_rank;
pub(crate) use span::{design_row, param_layout};
pub use waveplate::{standard_settings, waveplate_unitary, WaveplateSetting};
