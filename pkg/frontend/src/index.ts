export * from './types.js';
export * from './state.js';
export * from './api.js';
export * from './palettes.js';
export * from './views/dataDistribution.js';
export * from './views/subspacePcp.js';
export * from './views/scoreScatter.js';
export * from './views/insightMap.js';
export * from './views/insightDetail.js';
