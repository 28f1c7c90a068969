/*!
The user guide, embedded so that every code snippet in it compiles and
runs as a doctest.

Each module below holds one chapter of the book in `book/src/`; a doctest
failure therefore points at the exact chapter whose snippet broke. The
rendered version of the same text is built with `mdbook build book`.
*/

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/moments.md")]
pub mod moments {}

#[doc = include_str!("../../../book/src/supports.md")]
pub mod supports {}

#[doc = include_str!("../../../book/src/classification.md")]
pub mod classification {}

#[doc = include_str!("../../../book/src/construction.md")]
pub mod construction {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
