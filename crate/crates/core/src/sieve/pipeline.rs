//! Ordered segment pipeline.
//!
//! Worker threads claim segment indices from a shared counter and sieve them
//! concurrently. The consumer takes segments strictly in index order through
//! a reorder buffer, so the prime sequence (and every adjacency across a
//! segment boundary) is identical for any worker count. Workers never run more
//! than `window` segments ahead of the consumer.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::{channel, Receiver};
use std::sync::{Arc, Condvar, Mutex};
use std::thread::JoinHandle;

use super::segment::SegmentSieve;

struct Shared {
    sieve: SegmentSieve,
    next_index: AtomicU64,
    last_index: u64,
    stop: AtomicBool,
    consumed: Mutex<u64>,
    advanced: Condvar,
    window: u64,
}

enum Source {
    Inline { buf: Vec<u64>, next: u64 },
    Threaded { rx: Receiver<(u64, Vec<u64>)>, pending: BTreeMap<u64, Vec<u64>>, next: u64, workers: Vec<JoinHandle<()>> },
}

/// Every prime `<= limit`, in increasing order.
pub struct PrimeStream {
    shared: Arc<Shared>,
    source: Source,
    limit: u64,
    current: Vec<u64>,
    current_index: u64,
    word: usize,
    bits: u64,
    emitted_two: bool,
}

impl PrimeStream {
    pub fn new(limit: u64, segment_entries: usize, threads: usize) -> Self {
        let sieve = SegmentSieve::new(segment_entries, limit);
        let last_index = limit / sieve.span();
        let threads = threads.max(1);
        let shared = Arc::new(Shared {
            sieve,
            next_index: AtomicU64::new(0),
            last_index,
            stop: AtomicBool::new(false),
            consumed: Mutex::new(0),
            advanced: Condvar::new(),
            window: 2 * threads as u64,
        });
        let source = if threads == 1 {
            Source::Inline { buf: Vec::new(), next: 0 }
        } else {
            let (tx, rx) = channel();
            let workers = (0..threads)
                .map(|_| {
                    let shared = shared.clone();
                    let tx = tx.clone();
                    std::thread::spawn(move || worker(&shared, tx))
                })
                .collect();
            Source::Threaded { rx, pending: BTreeMap::new(), next: 0, workers }
        };
        PrimeStream {
            shared,
            source,
            limit,
            current: Vec::new(),
            current_index: 0,
            word: 0,
            bits: 0,
            emitted_two: false,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Loads the next segment in order; `false` once past the limit.
    fn advance(&mut self) -> bool {
        let shared = &self.shared;
        let (index, bits) = match &mut self.source {
            Source::Inline { buf, next } => {
                if *next > shared.last_index {
                    return false;
                }
                shared.sieve.sieve(*next, buf);
                let idx = *next;
                *next += 1;
                (idx, std::mem::take(buf))
            }
            Source::Threaded { rx, pending, next, .. } => {
                if *next > shared.last_index {
                    return false;
                }
                let bits = loop {
                    if let Some(b) = pending.remove(next) {
                        break b;
                    }
                    match rx.recv() {
                        Ok((i, b)) => {
                            pending.insert(i, b);
                        }
                        Err(_) => return false,
                    }
                };
                let idx = *next;
                *next += 1;
                *shared.consumed.lock().unwrap() = *next;
                shared.advanced.notify_all();
                (idx, bits)
            }
        };
        if let Source::Inline { buf, .. } = &mut self.source {
            // recycle the previous segment's allocation
            *buf = std::mem::replace(&mut self.current, bits);
        } else {
            self.current = bits;
        }
        self.current_index = index;
        self.word = 0;
        self.bits = self.current.first().copied().unwrap_or(0);
        true
    }
}

fn worker(shared: &Shared, tx: std::sync::mpsc::Sender<(u64, Vec<u64>)>) {
    loop {
        if shared.stop.load(Ordering::Acquire) {
            return;
        }
        let index = shared.next_index.fetch_add(1, Ordering::AcqRel);
        if index > shared.last_index {
            return;
        }
        {
            let mut consumed = shared.consumed.lock().unwrap();
            while index >= *consumed + shared.window {
                if shared.stop.load(Ordering::Acquire) {
                    return;
                }
                consumed = shared.advanced.wait(consumed).unwrap();
            }
        }
        let mut buf = Vec::new();
        shared.sieve.sieve(index, &mut buf);
        if tx.send((index, buf)).is_err() {
            return;
        }
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        if !self.emitted_two {
            self.emitted_two = true;
            if self.limit < 2 {
                return None;
            }
            if !self.advance() {
                return None;
            }
            return Some(2);
        }
        loop {
            if self.bits != 0 {
                let tz = self.bits.trailing_zeros() as u64;
                self.bits &= self.bits - 1;
                let span = self.shared.sieve.span();
                let p = self.current_index * span + 1 + 2 * (self.word as u64 * 64 + tz);
                return if p <= self.limit { Some(p) } else { None };
            }
            self.word += 1;
            if self.word < self.current.len() {
                self.bits = self.current[self.word];
                continue;
            }
            if !self.advance() {
                return None;
            }
        }
    }
}

impl Drop for PrimeStream {
    fn drop(&mut self) {
        self.shared.stop.store(true, Ordering::Release);
        {
            let _guard = self.shared.consumed.lock().unwrap();
            self.shared.advanced.notify_all();
        }
        if let Source::Threaded { rx, workers, .. } = &mut self.source {
            // unblock senders, then wait for every worker to leave
            while rx.try_recv().is_ok() {}
            for w in workers.drain(..) {
                let _ = w.join();
            }
        }
    }
}
