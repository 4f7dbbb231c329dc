//! Analysis of networks of independent point-to-point channels under
//! adversarial state.
//!
//! Channels may carry compound-channel (CC) state, fixed for a whole block,
//! or arbitrarily-varying (AVC) state, chosen per symbol. The crate computes
//! the noiseless bit-pipe rates such channels can be replaced by, decides
//! which node pairs can sustain positive rate, and checks the underlying
//! coding mechanisms by seeded Monte Carlo simulation.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`probcore`] | distributions, entropy, divergence, mutual information |
//! | [`channels`] | `p(y|x,s)` tensors, state fixing and mixing, products |
//! | [`capacity`] | Blahut–Arimoto, compound max-min / min-max, random-coding capacity |
//! | [`symmetrizability`] | symmetrizability and its order via LP feasibility |
//! | [`network`], [`reachability`] | network model and positive-rate pair sets |
//! | [`equivalence`] | equivalent bit-pipe rate of a designated state channel |
//! | [`regions`] | two-rate polyhedral regions for the three-node example |
//! | [`simulate`] | training, feedback, common-randomness and hash experiments |

pub mod capacity;
pub mod channels;
pub mod equivalence;
pub mod error;
pub mod lp;
pub mod network;
pub mod probcore;
pub mod reachability;
pub mod regions;
pub mod simulate;
pub mod symmetrizability;

pub use channels::{StateChannel, StateModelTag};
pub use error::{Error, Result};
pub use probcore::Distribution;
