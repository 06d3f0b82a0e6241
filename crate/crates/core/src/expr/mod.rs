//! Component expressions: parsing, pretty-printing and stack compilation.

mod ast;
mod parser;
mod program;

pub use ast::{BinOp, Expr, Func};
pub use parser::parse;
pub use program::{compile, compile_ast, CompiledProgram, Instr};
