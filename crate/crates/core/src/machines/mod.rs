//! Word representations, observations and the automata they encode.

pub mod automaton;
pub mod encode;
pub mod observation;
pub mod reduce;
pub mod simulate;
pub mod word;

pub use automaton::{parse_automaton, Automaton, Letter, StackAction, Top, Transition};
pub use encode::encode_automaton;
pub use observation::{validate_observation, ObsFlow, ObsSide, Observation};
pub use reduce::{accepts, accepts_with, interaction, naive_interaction, reduce, reduce_with};
pub use simulate::{simulate, SimVerdict, Simulation, SurfaceConfig};
pub use word::{word_rep, WordContext};
