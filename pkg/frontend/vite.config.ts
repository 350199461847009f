import { defineConfig } from 'vite';

export default defineConfig({
    server: {
        proxy: {
            // dev server forwards API calls to a locally running `aihm serve`
            '/api-proxy': {
                target: 'http://127.0.0.1:8315',
                changeOrigin: true,
                rewrite: (path) => path.replace(/^\/api-proxy/, ''),
            },
        },
    },
    test: {
        environment: 'happy-dom',
        globals: true,
        include: ['src/__tests__/**/*.test.ts'],
    },
});
