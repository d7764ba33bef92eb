import { ApiClient } from './api';
import { createApp } from './app';

const baseUrl = import.meta.env.VITE_API_URL ?? 'http://127.0.0.1:8000';
const root = document.querySelector<HTMLElement>('#app');
if (!root) throw new Error('missing #app root');

const app = createApp(root, new ApiClient(baseUrl));
void app.init();
