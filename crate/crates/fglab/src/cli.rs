//! Command-line front end. Placeholder while the library is built up.

pub fn main() -> i32 {
    eprintln!("fglab: not yet wired");
    2
}
