//! Networks of neurons as directed graphs carrying summing-functor
//! assignments of resources, evolved by categorical Hopfield dynamics and
//! analysed through clique homology, information cocycles and geometric
//! integrated information.
//!
//! Module map:
//!
//! | module | contents |
//! |--------|----------|
//! | [`graph`] | digraphs, pointed graphs, SCC, condensation, Kahn order, generators |
//! | [`simplicial`] | flag complexes, code nerves, Betti numbers, persistence |
//! | [`codes`] | pointed and weighted codes, sums, probabilities, firing model |
//! | [`resources`] | preordered resource monoids, measurings, conversion rates |
//! | [`netfunctors`] | summing functors, pushforwards, equalizer law |
//! | [`hopfield`] | categorical and classical Hopfield dynamics |
//! | [`transitions`] | transition systems, grafting, the architecture functor |
//! | [`information`] | entropy, divergences, the semigroup action, coboundaries |
//! | [`integinfo`] | KL projection, integrated information |

pub mod codes;
pub mod graph;
pub mod hopfield;
pub mod information;
pub mod integinfo;
pub mod io;
pub mod netfunctors;
pub mod numeric;
pub mod resources;
pub mod rng;
pub mod simplicial;
pub mod transitions;
