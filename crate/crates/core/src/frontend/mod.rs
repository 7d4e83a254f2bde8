//! Expression language, printing, JSON and session configuration.

mod config;
mod json;
mod parse;
mod print;

pub use config::{FiberDecl, SessionConfig, Tolerances, CONFIG_ENV};
pub use json::{poly_from_json, poly_to_json, SCHEMA_VERSION};
pub use parse::{parse, parse_integral, parse_parity, parse_signature, Expr};
pub use print::{print, print_integral, Style};
