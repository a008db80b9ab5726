import java.util.Scanner;

public class Main {
    public static void main(String[] args) {
        Scanner sc = new Scanner(System.in);
        String s = sc.next();
        StringBuilder sb = new StringBuilder();
        // walk backwards over the characters
        for (int i = s.length() - 1; i > 0; i--) {
            sb.append(s.charAt(i));
        }
        System.out.println(sb.toString());
    }
}
