from obfuscation_backend.commands import PipelineCommand
from obfuscation_backend.textio import read_text
from seq2seq_core.config import pipeline_config

from cipher.services import generate_ciphertext, write_cipher_files


class Command(PipelineCommand):
    help = 'Obfuscate a source file into <out>.obf plus its .obf.meta.json sidecar.'

    def add_arguments(self, parser):
        parser.add_argument('-i', '--input', required=True, help='Plaintext source file')
        parser.add_argument('-o', '--output', required=True, help='Output prefix')
        parser.add_argument('--n', type=int, dest='randomness_index',
                            help='Randomness index: successive weight draws (default 10)')
        parser.add_argument('--hidden', type=int, dest='hidden_size', help='Hidden size H')
        parser.add_argument('--max-decode-len', type=int, dest='max_decode_len',
                            help='Ciphertext length cap')
        parser.add_argument('--charset-file', help='UTF-8 file whose characters form the output charset')
        self.add_config_arguments(parser)

    def run(self, **options):
        plaintext = read_text(options['input'])
        charset = read_text(options['charset_file']) if options['charset_file'] else None
        config = pipeline_config(
            self.option('hidden_size', options),
            max_decode_len=self.option('max_decode_len', options),
            seed=self.seed(options),
        )
        record = generate_ciphertext(
            plaintext, charset, config, self.option('randomness_index', options)
        )
        write_cipher_files(record, options['output'])
        if options['record']:
            record.save()
        self.emit_json({'ciphertext_len': record.ciphertext_len, 'seed': record.seed})
