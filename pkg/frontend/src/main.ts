import { App } from './app';
import './style.css';

const params = new URLSearchParams(window.location.search);
const projectId = params.get('project') ?? 'higf-detector';
const actor = params.get('actor') ?? 'maier';
const baseUrl = params.get('api') ?? '/api-proxy';

const root = document.getElementById('app');
if (root) {
    const app = new App(root, { baseUrl, projectId, actor });
    void app.start();
}
