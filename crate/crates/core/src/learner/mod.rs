//! The Tsetlin Machine game: vote summation, feedback, and training loops.

mod feedback;
mod machine;
mod multiclass;

pub use feedback::{
    feedback_activation_probability, type_i_draw, type_i_feedback, type_ii_draw, type_ii_feedback, FeedbackKind,
};
pub use machine::{HyperParams, TsetlinMachine};
pub use multiclass::{EpochRecord, FitOptions, MultiClassTm, TrainingHistory};
pub(crate) use multiclass::argmax_lowest;
