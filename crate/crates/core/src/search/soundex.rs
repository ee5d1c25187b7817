/// Classic four-character Soundex over the ASCII letters of `s`; other
/// characters are skipped. Returns `None` when `s` has no letters.
pub fn soundex(s: &str) -> Option<String> {
    fn digit(c: u8) -> u8 {
        match c {
            b'B' | b'F' | b'P' | b'V' => b'1',
            b'C' | b'G' | b'J' | b'K' | b'Q' | b'S' | b'X' | b'Z' => b'2',
            b'D' | b'T' => b'3',
            b'L' => b'4',
            b'M' | b'N' => b'5',
            b'R' => b'6',
            b'H' | b'W' => b'h',
            _ => b'0',
        }
    }
    let mut letters = s.bytes().filter(u8::is_ascii_alphabetic).map(|c| c.to_ascii_uppercase());
    let first = letters.next()?;
    let mut code = vec![first];
    let mut last = digit(first);
    for c in letters {
        let d = digit(c);
        match d {
            // H and W do not separate equal codes.
            b'h' => continue,
            b'0' => last = b'0',
            _ if d != last => {
                code.push(d);
                last = d;
                if code.len() == 4 {
                    break;
                }
            }
            _ => {}
        }
    }
    code.resize(4, b'0');
    Some(String::from_utf8(code).expect("ascii"))
}
