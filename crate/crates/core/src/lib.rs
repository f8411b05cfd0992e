//! Part-of-speech tagging with a multilayer perceptron.
//!
//! A [`lexicon::Lexicon`] maps every word to a tag probability vector, using
//! a fullform table, a suffix trie for unknown words and a default entry.
//! A [`network::Network`] then disambiguates each word from the lexicon
//! vectors of the word and its right neighbours plus its own outputs for
//! the words to the left (see [`tagger`]).

pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod lexicon;
pub mod network;
pub mod synthetic;
pub mod tagger;

pub use corpus::{parse_corpus, TagSet, TaggedCorpus, Token};
pub use error::{Error, Result};
pub use lexicon::{Lexicon, LexiconParams};
pub use network::{Network, NetworkShape, TrainingHyperparams};
pub use tagger::{ContextConfig, TagDecision, TaggerModel, TrainingSchedule};
