//! Samples a leaf process on a torus, writes it in both file formats and
//! reads it back.

use std::io::Cursor;

use confetti::geometry::WindowSpec;
use confetti::process::{read_binary, read_text, sample_process, write_binary, write_text, Horizon};

fn main() -> confetti::Result<()> {
    let window = WindowSpec::torus(6.0)?;
    let proc = sample_process(window, 0.5, Horizon::fixed(2.0), 42)?;
    println!("{} leaves on a torus of period 6 up to time 2", proc.len());

    let mut text = Vec::new();
    write_text(&proc, &mut text)?;
    let mut bin = Vec::new();
    write_binary(&proc, &mut bin)?;
    println!("text file: {} bytes, binary file: {} bytes", text.len(), bin.len());
    println!("{}", String::from_utf8_lossy(&text).lines().take(4).collect::<Vec<_>>().join("\n"));

    assert_eq!(read_text(Cursor::new(&text))?.leaves, proc.leaves);
    assert_eq!(read_binary(Cursor::new(&bin))?.leaves, proc.leaves);
    println!("round trips exact");
    Ok(())
}
