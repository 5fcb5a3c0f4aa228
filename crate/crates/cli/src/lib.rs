//! Library side of the `beaverlab` binary: pinned file formats and run
//! manifests, shared with the integration tests.

pub mod formats;
pub mod manifest;
