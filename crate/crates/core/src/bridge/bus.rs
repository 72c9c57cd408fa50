use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use super::Envelope;

type Callback = Box<dyn FnMut(&Envelope) + Send>;

struct Subscriber {
    filter: String,
    callback: Callback,
}

#[derive(Default)]
struct Inner {
    next_id: u64,
    subscribers: BTreeMap<u64, Subscriber>,
}

/// In-process publish/subscribe bus.
///
/// Delivery is synchronous and happens under one lock, so every subscriber
/// sees all envelopes in the same total order. Callbacks must not publish
/// on the same bus.
#[derive(Clone, Default)]
pub struct Bus {
    inner: Arc<Mutex<Inner>>,
}

/// Handle returned by [`Bus::subscribe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubscriptionId(u64);

impl Bus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `callback` for topics matching `filter`; `+` matches one
    /// level and a trailing `#` any remainder, as in MQTT.
    pub fn subscribe(&self, filter: &str, callback: impl FnMut(&Envelope) + Send + 'static) -> SubscriptionId {
        let mut inner = self.inner.lock().unwrap();
        let id = inner.next_id;
        inner.next_id += 1;
        inner.subscribers.insert(
            id,
            Subscriber {
                filter: filter.to_string(),
                callback: Box::new(callback),
            },
        );
        SubscriptionId(id)
    }

    pub fn unsubscribe(&self, id: SubscriptionId) {
        self.inner.lock().unwrap().subscribers.remove(&id.0);
    }

    pub fn publish(&self, env: &Envelope) {
        let mut inner = self.inner.lock().unwrap();
        for sub in inner.subscribers.values_mut() {
            if topic_matches(&sub.filter, &env.topic) {
                (sub.callback)(env);
            }
        }
    }
}

pub fn topic_matches(filter: &str, topic: &str) -> bool {
    let mut f = filter.split('/');
    let mut t = topic.split('/');
    loop {
        match (f.next(), t.next()) {
            (Some("#"), _) => return true,
            (Some("+"), Some(_)) => {}
            (Some(a), Some(b)) if a == b => {}
            (None, None) => return true,
            _ => return false,
        }
    }
}

/// Collects every envelope published on a bus as NDJSON lines.
#[derive(Clone, Default)]
pub struct Transcript {
    lines: Arc<Mutex<Vec<String>>>,
}

impl Transcript {
    pub fn attach(bus: &Bus) -> Self {
        let t = Transcript::default();
        let lines = Arc::clone(&t.lines);
        bus.subscribe("#", move |env| lines.lock().unwrap().push(env.to_line()));
        t
    }

    pub fn lines(&self) -> Vec<String> {
        self.lines.lock().unwrap().clone()
    }

    /// All lines, each terminated by a newline.
    pub fn text(&self) -> String {
        self.lines().iter().map(|l| format!("{l}\n")).collect()
    }
}
