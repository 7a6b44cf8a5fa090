// Debounce for live re-query: rapid edits collapse into one trailing call.
export function debounce(fn, waitMs) {
    let timer = null;
    let pending = null;
    const wrapped = (...args) => {
        pending = args;
        if (timer !== null)
            clearTimeout(timer);
        timer = setTimeout(() => {
            timer = null;
            const args2 = pending;
            pending = null;
            fn(...args2);
        }, waitMs);
    };
    wrapped.cancel = () => {
        if (timer !== null)
            clearTimeout(timer);
        timer = null;
        pending = null;
    };
    wrapped.flush = () => {
        if (timer !== null && pending !== null) {
            clearTimeout(timer);
            const args = pending;
            timer = null;
            pending = null;
            fn(...args);
        }
    };
    return wrapped;
}
