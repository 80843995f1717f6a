/** Display formatting; the only client-side arithmetic allowed is rounding
 * for presentation. */
export function formatLifetimeNs(value) {
    if (!Number.isFinite(value))
        return "infinite";
    if (value >= 1e6)
        return `${(value / 1e6).toPrecision(6)} ms`;
    if (value >= 1e3)
        return `${(value / 1e3).toPrecision(6)} us`;
    return `${value.toPrecision(6)} ns`;
}
export function formatRefractiveIndex(value) {
    return value.toFixed(2);
}
