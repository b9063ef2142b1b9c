//! Library surface of the `pps` command-line tool: the specification file
//! format, the report assembler, and the command implementations.

pub mod commands;
pub mod report;
pub mod specfile;
