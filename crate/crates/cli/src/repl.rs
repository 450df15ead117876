use std::io::{self, BufRead, Write};

use qumin::interp::Interpreter;
use qumin::syntax::{parse_program, ParseErrorKind};

const HELP: &str = "\
:load NAME    load the classical library NAME.qum
:qload NAME   type check and load the quantum library NAME.qum
:help         show this text
:quit         leave the session";

/// True when the text fails to parse only because it stops early, so the
/// next line should be appended to it.
fn incomplete(text: &str) -> bool {
    match parse_program(text) {
        Ok(_) => false,
        Err(e) => matches!(e.kind, ParseErrorKind::Expected(_)) && e.span.start >= text.trim_end().len(),
    }
}

/// Reads entries from `input` until end of input or `:quit`. Values are
/// written to `out`; errors are reported and the session continues.
pub fn run<R: BufRead, W: Write>(it: &mut Interpreter, input: R, mut out: W, prompts: bool) -> io::Result<()> {
    let mut pending = String::new();
    let mut lines = input.lines();
    loop {
        if prompts {
            write!(out, "{}", if pending.is_empty() { "> " } else { "... " })?;
            out.flush()?;
        }
        let Some(line) = lines.next().transpose()? else {
            if !pending.trim().is_empty() {
                submit(it, &pending, &mut out)?;
            }
            return Ok(());
        };
        if pending.is_empty() {
            let trimmed = line.trim();
            if let Some(command) = trimmed.strip_prefix(':') {
                let mut words = command.split_whitespace();
                match (words.next(), words.next()) {
                    (Some("quit" | "q"), None) => return Ok(()),
                    (Some("help"), None) => writeln!(out, "{HELP}")?,
                    (Some(verb @ ("load" | "qload")), Some(name)) => {
                        submit(it, &format!("--{verb} {name}"), &mut out)?
                    }
                    _ => writeln!(out, "error: unknown command `{trimmed}` (try :help)")?,
                }
                continue;
            }
            if trimmed.is_empty() {
                continue;
            }
        }
        pending.push_str(&line);
        pending.push('\n');
        if incomplete(&pending) {
            continue;
        }
        submit(it, &pending, &mut out)?;
        pending.clear();
    }
}

fn submit<W: Write>(it: &mut Interpreter, text: &str, out: &mut W) -> io::Result<()> {
    match it.eval_repl(text) {
        Ok(Some(value)) => writeln!(out, "{value}"),
        Ok(None) => Ok(()),
        Err(e) => writeln!(out, "{}", it.render_error(&e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(input: &str) -> String {
        let mut it = Interpreter::builder().seed(1).capture().env_path(false).build();
        let mut out = Vec::new();
        run(&mut it, input.as_bytes(), &mut out, false).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn evaluates_expressions() {
        assert_eq!(session("(3 + 3)\n"), "6\n");
    }

    #[test]
    fn bindings_persist_and_are_silent() {
        assert_eq!(session("let f = lambda(x){ (x + 5) }\nf(5)\n"), "10\n");
    }

    #[test]
    fn errors_do_not_end_the_session() {
        let out = session("car([])\n(1 + 1)\n");
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].contains("error:"), "{out}");
        assert_eq!(lines[1], "2");
    }

    #[test]
    fn multi_line_entries() {
        assert_eq!(session("let g = lambda(x,y){\n  (x + y)\n}\ng(1)(2)\n"), "3\n");
    }

    #[test]
    fn quit_stops_reading() {
        assert_eq!(session("1\n:quit\n2\n"), "1\n");
    }

    #[test]
    fn unknown_commands_are_reported() {
        assert!(session(":frobnicate\n").starts_with("error: unknown command"));
    }

    #[test]
    fn missing_module() {
        assert!(session(":load doesNotExist\n").contains("not found"));
    }
}
