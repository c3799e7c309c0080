//! Command line front end and HTTP query server.

pub mod cli;
pub mod server;

pub use cli::run;
pub use server::router;
