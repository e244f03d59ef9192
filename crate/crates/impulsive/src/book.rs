//! Runs every code snippet of the guide in `book/` as a doc-test, so the
//! book cannot drift from the library. One module per chapter keeps test
//! failures attributable.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/spaces-and-flows.md")]
mod spaces_and_flows {}

#[doc = include_str!("../../../book/src/impulsive-systems.md")]
mod impulsive_systems {}

#[doc = include_str!("../../../book/src/time-sequences.md")]
mod time_sequences {}

#[doc = include_str!("../../../book/src/entropy.md")]
mod entropy_chapter {}

#[doc = include_str!("../../../book/src/quotient.md")]
mod quotient_chapter {}

#[doc = include_str!("../../../book/src/builtin-systems.md")]
mod builtin_systems {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli_chapter {}
