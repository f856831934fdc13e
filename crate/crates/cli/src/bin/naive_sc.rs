//! A minimal external symptom checker speaking the harness's NDJSON
//! protocol, for wiring tests and as a starting point for real adapters.
//! It asks about a fixed list of symptoms, then predicts a fixed ranking.
//!
//! ```text
//! scsim-naive-sc --ask fever,cough --predict MONDO:1,MONDO:2
//! ```
//!
//! `--duplicate-predictions` and `--ask-after-finish` make it misbehave on
//! purpose, for protocol-enforcement tests.

use std::io::{BufRead, Write};

use serde_json::{json, Value};

struct Options {
    ask: Vec<String>,
    predict: Vec<String>,
    duplicate_predictions: bool,
    ask_after_finish: bool,
}

fn parse_args() -> Options {
    let mut options = Options {
        ask: Vec::new(),
        predict: Vec::new(),
        duplicate_predictions: false,
        ask_after_finish: false,
    };
    let mut args = std::env::args().skip(1);
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--ask" => {
                let list = args.next().unwrap_or_default();
                options.ask = list.split(',').map(str::to_string).collect();
            }
            "--predict" => {
                let list = args.next().unwrap_or_default();
                options.predict = list.split(',').map(str::to_string).collect();
            }
            "--duplicate-predictions" => options.duplicate_predictions = true,
            "--ask-after-finish" => options.ask_after_finish = true,
            other => {
                eprintln!("unknown argument {other:?}");
                std::process::exit(2);
            }
        }
    }
    options
}

fn send(msg: &Value) {
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer(&mut stdout, msg).expect("stdout open");
    stdout.write_all(b"\n").expect("stdout open");
    stdout.flush().expect("stdout open");
}

fn prediction(options: &Options) -> Value {
    let mut ranked = options.predict.clone();
    if options.duplicate_predictions {
        if let Some(first) = ranked.first().cloned() {
            ranked.push(first);
        }
    }
    json!({"type": "predict", "ranked": ranked})
}

fn main() {
    let options = parse_args();
    let stdin = std::io::stdin().lock();
    // questions remaining in the current interview
    let mut queue: Vec<String> = Vec::new();
    for line in stdin.lines() {
        let line = line.expect("stdin readable");
        if line.trim().is_empty() {
            continue;
        }
        let msg: Value = serde_json::from_str(&line).expect("harness sends valid JSON");
        match msg["type"].as_str() {
            Some("init") => {
                queue = options.ask.clone();
                queue.reverse();
                match queue.pop() {
                    Some(symptom) => send(&json!({"type": "ask", "symptom": symptom})),
                    None => send(&prediction(&options)),
                }
            }
            Some("answer") => match queue.pop() {
                Some(symptom) => send(&json!({"type": "ask", "symptom": symptom})),
                None => send(&prediction(&options)),
            },
            Some("finish") => {
                if options.ask_after_finish {
                    send(&json!({"type": "ask", "symptom": "one_more_thing"}));
                } else {
                    send(&prediction(&options));
                }
            }
            other => {
                eprintln!("unexpected message type {other:?}");
                std::process::exit(1);
            }
        }
    }
}
