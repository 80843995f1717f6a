/** Trailing-edge debounce: the slider fires one request per quiet period. */
export function debounce(fn, waitMs) {
    let timer = null;
    return (...args) => {
        if (timer !== null)
            clearTimeout(timer);
        timer = setTimeout(() => {
            timer = null;
            fn(...args);
        }, waitMs);
    };
}
