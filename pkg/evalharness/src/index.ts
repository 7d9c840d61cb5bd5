export * from "./rng.js";
export * from "./metrics.js";
export * from "./png.js";
export * from "./bundle.js";
export * from "./splits.js";
export * from "./baselines.js";
export * from "./protocol.js";
export * from "./cnn.js";
export * from "./gradcam.js";
